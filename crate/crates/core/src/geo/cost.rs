use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::grid::haversine_m;
use super::raster::Raster;
use crate::error::{Error, Result};

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on cost, then on cell index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Least accumulated cost from any source over 8-connected cells. A step
/// costs the mean friction of its two cells times the great-circle
/// distance between their centres. Nodata friction cells are barriers;
/// unreachable cells come out as nodata.
pub fn cost_distance(friction: &Raster, sources: &[usize]) -> Result<Raster> {
    if sources.is_empty() {
        return Err(Error::invalid("cost distance needs at least one source"));
    }
    let spec = &friction.spec;
    if let Some(&s) = sources.iter().find(|&&s| s >= spec.len()) {
        return Err(Error::invalid(format!("source cell {s} outside the grid")));
    }
    if friction.values.iter().any(|&f| !f.is_nan() && !(f > 0.0)) {
        return Err(Error::invalid("friction must be positive on traversable cells"));
    }
    let mut dist = vec![f64::INFINITY; spec.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if friction.values[s].is_nan() {
            continue;
        }
        dist[s] = 0.0;
        heap.push(Entry { cost: 0.0, idx: s });
    }
    let (nr, nc) = (spec.n_rows as isize, spec.n_cols as isize);
    while let Some(Entry { cost, idx }) = heap.pop() {
        if cost > dist[idx] {
            continue;
        }
        let (r, c) = spec.row_col(idx);
        let here = spec.center(r, c);
        for dr in -1..=1isize {
            for dc in -1..=1isize {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (rr, cc) = (r as isize + dr, c as isize + dc);
                if rr < 0 || cc < 0 || rr >= nr || cc >= nc {
                    continue;
                }
                let j = spec.index(rr as usize, cc as usize);
                let fj = friction.values[j];
                if fj.is_nan() {
                    continue;
                }
                let step = 0.5 * (friction.values[idx] + fj) * haversine_m(here, spec.center(rr as usize, cc as usize));
                let next = cost + step;
                if next < dist[j] {
                    dist[j] = next;
                    heap.push(Entry { cost: next, idx: j });
                }
            }
        }
    }
    let values = dist.into_iter().map(|d| if d.is_finite() { d } else { f64::NAN }).collect();
    Raster::new(spec.clone(), values, "cost")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{GridSpec, EARTH_RADIUS_M};

    #[test]
    fn straight_run_on_equator() {
        let cs = 0.5;
        let spec = GridSpec::new(1, 9, cs, cs / 2.0, 0.0).unwrap();
        let f = 3.0;
        let d = cost_distance(&Raster::filled(&spec, f, ""), &[0]).unwrap();
        let width = EARTH_RADIUS_M * cs.to_radians();
        for k in 0..9 {
            let expect = k as f64 * f * width;
            assert!((d.values[k] - expect).abs() <= 1e-9 * expect.max(1.0), "{k}");
        }
    }

    #[test]
    fn doubling_friction_doubles_cost() {
        let spec = GridSpec::new(5, 5, 1.0, 10.0, 0.0).unwrap();
        let f: Vec<f64> = (0..25).map(|i| 1.0 + (i % 7) as f64).collect();
        let a = cost_distance(&Raster::new(spec.clone(), f.clone(), "").unwrap(), &[12]).unwrap();
        let b = cost_distance(&Raster::new(spec, f.iter().map(|v| 2.0 * v).collect(), "").unwrap(), &[12]).unwrap();
        assert_eq!(a.values[12], 0.0);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((2.0 * x - y).abs() <= 1e-9 * y.max(1.0));
        }
    }

    #[test]
    fn barriers_leave_cells_unreachable() {
        let spec = GridSpec::new(1, 3, 1.0, 0.5, 0.0).unwrap();
        let d = cost_distance(&Raster::new(spec, vec![1.0, f64::NAN, 1.0], "").unwrap(), &[0]).unwrap();
        assert!(d.values[1].is_nan() && d.values[2].is_nan());
    }

    #[test]
    fn errors() {
        let spec = GridSpec::new(1, 2, 1.0, 0.5, 0.0).unwrap();
        assert!(cost_distance(&Raster::filled(&spec, 1.0, ""), &[]).is_err());
        assert!(cost_distance(&Raster::filled(&spec, 0.0, ""), &[0]).is_err());
        assert!(cost_distance(&Raster::filled(&spec, 1.0, ""), &[5]).is_err());
    }
}
