use super::raster::Raster;
use crate::error::{Error, Result};

/// Days per month of a non-leap year.
pub const MONTH_DAYS: [f64; 12] = [31.0, 28.0, 31.0, 30.0, 31.0, 30.0, 31.0, 31.0, 30.0, 31.0, 30.0, 31.0];

#[derive(Clone, Debug)]
pub struct Climate {
    /// Annual precipitation, mm.
    pub map: Raster,
    /// Day-weighted mean temperature.
    pub mat: Raster,
    /// Annual potential evapotranspiration, mm.
    pub pet: Raster,
    /// MAP / PET; nodata where PET is zero.
    pub aridity: Raster,
}

fn check_months(name: &str, layers: &[Raster]) -> Result<()> {
    if layers.len() != 12 {
        return Err(Error::invalid(format!("{name}: expected 12 monthly layers, got {}", layers.len())));
    }
    for l in &layers[1..] {
        layers[0].same_grid(l)?;
    }
    Ok(())
}

/// Annual indices from monthly precipitation (mm), mean temperature and
/// mean daily PET (mm/day). A nodata month makes the annual cell nodata.
pub fn derive_climate(precip: &[Raster], temp: &[Raster], pet_daily: &[Raster]) -> Result<Climate> {
    check_months("precipitation", precip)?;
    check_months("temperature", temp)?;
    check_months("pet", pet_daily)?;
    precip[0].same_grid(&temp[0])?;
    precip[0].same_grid(&pet_daily[0])?;
    let spec = precip[0].spec.clone();
    let n = spec.len();
    let year_days: f64 = MONTH_DAYS.iter().sum();
    let (mut map, mut mat, mut pet, mut ari) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let mut p = 0.0;
        let mut t = 0.0;
        let mut e = 0.0;
        for m in 0..12 {
            p += precip[m].values[i];
            t += temp[m].values[i] * MONTH_DAYS[m];
            e += pet_daily[m].values[i] * MONTH_DAYS[m];
        }
        map[i] = p;
        mat[i] = t / year_days;
        pet[i] = e;
        ari[i] = if e > 0.0 { p / e } else { f64::NAN };
    }
    Ok(Climate {
        map: Raster::new(spec.clone(), map, "mm/year")?,
        mat: Raster::new(spec.clone(), mat, "degC")?,
        pet: Raster::new(spec.clone(), pet, "mm/year")?,
        aridity: Raster::new(spec, ari, "")?,
    })
}
