use crate::error::{Error, Result};
use crate::geo::Raster;

pub const MAX_ROUNDS: usize = 100;
/// Relative residual at which alignment stops.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AlignStats {
    pub rounds: usize,
    /// Cells frozen at their capacity.
    pub capped: usize,
}

/// Scales each layer to its national target and enforces per-cell capacity.
///
/// `layers[c][i]` is the area of layer `c` in cell `i`; `caps[i]` bounds the
/// sum over layers in cell `i`. Every round rescales the free cells of each
/// layer so the layer meets its target, then freezes cells whose total
/// exceeds capacity after shrinking all their layers by a common factor.
/// The excess of a frozen cell therefore moves to the free cells of the same
/// layer, in proportion to their current values.
pub fn align_layers(layers: &mut [Vec<f64>], targets: &[f64], caps: &[f64]) -> Result<AlignStats> {
    let names: Vec<String> = (0..layers.len()).map(|c| format!("layer {c}")).collect();
    align_layers_named(layers, targets, caps, &names)
}

/// [`align_layers`] with layer names for error messages.
pub fn align_layers_named(layers: &mut [Vec<f64>], targets: &[f64], caps: &[f64], names: &[String]) -> Result<AlignStats> {
    if layers.len() != names.len() {
        return Err(Error::invalid("one name per layer required"));
    }
    if layers.len() != targets.len() {
        return Err(Error::invalid(format!("{} layers for {} targets", layers.len(), targets.len())));
    }
    let n = caps.len();
    if layers.iter().any(|l| l.len() != n) {
        return Err(Error::invalid("layer length differs from the capacity list"));
    }
    if layers.iter().flatten().chain(caps).any(|v| !(*v >= 0.0)) {
        return Err(Error::invalid("negative or missing area"));
    }
    if targets.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::invalid("negative or missing national total"));
    }
    let feasible: f64 = caps.iter().sum();
    let wanted: f64 = targets.iter().sum();
    if wanted > feasible * (1.0 + 1e-12) {
        return Err(Error::Infeasible(format!(
            "infeasible national total: {wanted} ha requested, {feasible} ha of surface"
        )));
    }
    for (c, (layer, &t)) in layers.iter_mut().zip(targets).enumerate() {
        if t == 0.0 {
            layer.iter_mut().for_each(|v| *v = 0.0);
        } else if layer.iter().sum::<f64>() == 0.0 {
            return Err(Error::Infeasible(format!(
                "{}: national total {t} ha but no modelled harvested area to scale", names[c]
            )));
        }
    }

    let mut frozen = vec![false; n];
    let mut stats = AlignStats::default();
    let mut residual = f64::INFINITY;
    for round in 1..=MAX_ROUNDS {
        stats.rounds = round;
        for (c, (layer, &t)) in layers.iter_mut().zip(targets).enumerate() {
            if t == 0.0 {
                continue;
            }
            let (mut fixed, mut free) = (0.0, 0.0);
            for (v, f) in layer.iter().zip(&frozen) {
                if *f {
                    fixed += v;
                } else {
                    free += v;
                }
            }
            let need = (t - fixed).max(0.0);
            if free == 0.0 {
                if need > TOLERANCE * t {
                    return Err(Error::Infeasible(format!(
                        "{}: {need} ha left over with every cell at capacity", names[c]
                    )));
                }
                continue;
            }
            let s = need / free;
            for (v, f) in layer.iter_mut().zip(&frozen) {
                if !*f {
                    *v *= s;
                }
            }
        }
        let mut newly = 0;
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let total: f64 = layers.iter().map(|l| l[i]).sum();
            if total > caps[i] {
                let f = caps[i] / total;
                for l in layers.iter_mut() {
                    l[i] *= f;
                }
                frozen[i] = true;
                newly += 1;
            }
        }
        stats.capped += newly;
        residual = layers
            .iter()
            .zip(targets)
            .filter(|(_, t)| **t > 0.0)
            .map(|(l, t)| (l.iter().sum::<f64>() - t).abs() / t)
            .fold(0.0, f64::max);
        if newly == 0 && residual < TOLERANCE {
            return Ok(stats);
        }
    }
    if residual < TOLERANCE {
        Ok(stats)
    } else {
        Err(Error::Infeasible(format!(
            "alignment left a relative residual of {residual:e} after {MAX_ROUNDS} rounds"
        )))
    }
}

/// Aligns one crop layer to a national total inside one country.
///
/// The country's share of each cell is `harea·frac` with capacity
/// `cell_area·frac`; the returned raster holds that share after alignment
/// and zero outside the country.
pub fn align_to_national(harea: &Raster, country_frac: &Raster, national_total: f64) -> Result<(Raster, AlignStats)> {
    harea.same_grid(country_frac)?;
    let spec = &harea.spec;
    let row_area = spec.row_areas_ha();
    let cells: Vec<usize> = (0..spec.len()).filter(|&i| country_frac.values[i] > 0.0).collect();
    let mut layer = vec![cells.iter().map(|&i| harea.values[i].max(0.0) * country_frac.values[i]).collect::<Vec<_>>()];
    let caps: Vec<f64> = cells.iter().map(|&i| row_area[i / spec.n_cols] * country_frac.values[i]).collect();
    let stats = align_layers(&mut layer, &[national_total], &caps)?;
    let mut out = Raster::filled(spec, 0.0, "ha");
    for (&i, v) in cells.iter().zip(&layer[0]) {
        out.values[i] = *v;
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GridSpec;
    use proptest::prelude::*;

    #[test]
    fn two_cell_trace() {
        let mut l = vec![vec![60.0, 40.0]];
        let st = align_layers(&mut l, &[200.0], &[100.0, 100.0]).unwrap();
        assert_eq!(l[0], vec![100.0, 100.0]);
        assert_eq!(st.capped, 1);
    }

    #[test]
    fn unit_scale_is_identity() {
        let mut l = vec![vec![60.0, 40.0]];
        align_layers(&mut l, &[100.0], &[1000.0, 1000.0]).unwrap();
        assert_eq!(l[0], vec![60.0, 40.0]);
    }

    #[test]
    fn zero_total_zeroes() {
        let mut l = vec![vec![60.0, 40.0]];
        align_layers(&mut l, &[0.0], &[100.0, 100.0]).unwrap();
        assert_eq!(l[0], vec![0.0, 0.0]);
    }

    #[test]
    fn infeasible_and_empty_errors() {
        let mut l = vec![vec![60.0, 40.0]];
        let e = align_layers(&mut l, &[201.0], &[100.0, 100.0]).unwrap_err();
        assert!(e.to_string().contains("infeasible national total"));
        assert_eq!(e.exit_code(), 4);
        let mut z = vec![vec![0.0, 0.0]];
        assert!(align_layers(&mut z, &[1.0], &[100.0, 100.0]).is_err());
    }

    #[test]
    fn raster_wrapper_respects_fraction() {
        let s = GridSpec::new(1, 2, 0.01, 0.0, 0.0).unwrap();
        let h = Raster::new(s.clone(), vec![10.0, 30.0], "ha").unwrap();
        let f = Raster::new(s, vec![1.0, 0.5], "1").unwrap();
        let (out, _) = align_to_national(&h, &f, 50.0).unwrap();
        assert!((out.values[0] - 20.0).abs() < 1e-12 && (out.values[1] - 30.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn meets_targets_within_capacity(
            cells in prop::collection::vec((0.0f64..50.0, 10.0f64..100.0, 0.0f64..50.0), 2..40),
            fill in 0.05f64..0.9,
        ) {
            let mut layers = vec![cells.iter().map(|c| c.0).collect::<Vec<_>>(), cells.iter().map(|c| c.2).collect()];
            let caps: Vec<f64> = cells.iter().map(|c| c.1).collect();
            let room: f64 = caps.iter().sum::<f64>() * fill;
            let targets = [room * 0.6, room * 0.4];
            prop_assume!(layers.iter().all(|l| l.iter().sum::<f64>() > 0.0));
            match align_layers(&mut layers, &targets, &caps) {
                Ok(_) => {
                    for (l, t) in layers.iter().zip(&targets) {
                        prop_assert!((l.iter().sum::<f64>() - t).abs() <= TOLERANCE * t);
                    }
                    for i in 0..caps.len() {
                        prop_assert!(layers[0][i] + layers[1][i] <= caps[i] * (1.0 + 1e-12));
                    }
                }
                Err(e) => prop_assert_eq!(e.exit_code(), 4),
            }
        }
    }
}
