use crate::error::{Error, Result};
use crate::geo::Raster;

/// Fertilizer mass per cell, kg: `harea · Σ_j rate_j · frac_j`.
///
/// `rates` pairs each country's adjusted rate (kg/ha) with its cell
/// fractions. Cells outside every country hold nodata.
pub fn fertilizer_raster(harea: &Raster, rates: &[(f64, &Raster)]) -> Result<Raster> {
    for (_, f) in rates {
        harea.same_grid(f)?;
    }
    let mut out = Raster::filled(&harea.spec, f64::NAN, "kg");
    for i in 0..harea.values.len() {
        let (mut frac_sum, mut weighted) = (0.0, 0.0);
        for (rate, f) in rates {
            let p = f.values[i];
            if p > 0.0 {
                frac_sum += p;
                weighted += rate * p;
            }
        }
        if frac_sum > 1.0 + 1e-9 {
            let (r, c) = harea.spec.row_col(i);
            return Err(Error::invalid(format!("country fractions of cell ({r}, {c}) sum to {frac_sum}")));
        }
        if frac_sum > 0.0 {
            let h = harea.values[i];
            out.values[i] = if h.is_nan() { 0.0 } else { h * weighted };
        }
    }
    Ok(out)
}
