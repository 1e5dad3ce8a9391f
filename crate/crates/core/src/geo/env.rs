use super::raster::Raster;
use crate::error::Result;

/// Crop-area-weighted mean of `env` over the cells where the crop grows in
/// the country: weights are `crop_area · country_fraction`. Nodata env
/// cells drop out of both sums. `None` when no weight remains.
pub fn aggregate_environmental(env: &Raster, crop_area: &Raster, country_frac: &Raster) -> Result<Option<f64>> {
    env.same_grid(crop_area)?;
    env.same_grid(country_frac)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&e, &a), &f) in env.values.iter().zip(&crop_area.values).zip(&country_frac.values) {
        if e.is_nan() || !(a > 0.0) || !(f > 0.0) {
            continue;
        }
        let w = a * f;
        num += e * w;
        den += w;
    }
    Ok((den > 0.0).then(|| num / den))
}
