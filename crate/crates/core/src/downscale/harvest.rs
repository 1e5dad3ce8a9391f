use std::collections::BTreeMap;

use super::neighbor::{NeighborIndex, RINGS};
use crate::domain::CropClass;
use crate::error::{Error, Result};
use crate::geo::{GridSpec, Raster};

/// Base-year harvested area per crop, plus the base-year non-rice cropland
/// that serves as the ratio denominator.
#[derive(Clone, Debug)]
pub struct CropMapSet2000 {
    pub crops: BTreeMap<CropClass, Raster>,
    pub cropland_nr: Raster,
    /// Σ crops per cell, NaN counted as zero.
    total: Vec<f64>,
}

impl CropMapSet2000 {
    pub fn new(crops: BTreeMap<CropClass, Raster>, cropland_nr: Raster) -> Result<Self> {
        let mut total = vec![0.0; cropland_nr.spec.len()];
        for (c, r) in &crops {
            r.same_grid(&cropland_nr)
                .map_err(|_| Error::invalid(format!("base map for {c} is on a different grid")))?;
            if r.values.iter().any(|v| *v < 0.0) {
                return Err(Error::invalid(format!("base map for {c} has negative cells")));
            }
            for (t, v) in total.iter_mut().zip(&r.values) {
                if !v.is_nan() {
                    *t += v;
                }
            }
        }
        Ok(CropMapSet2000 { crops, cropland_nr, total })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.cropland_nr.spec
    }

    pub fn crop(&self, crop: CropClass) -> Result<&Raster> {
        self.crops
            .get(&crop)
            .ok_or_else(|| Error::Missing(format!("base harvested-area map for {}", crop.file_name())))
    }

    /// Whether any crop was harvested in the cell in the base year.
    pub fn cultivated(&self, idx: usize) -> bool {
        self.total[idx] > 0.0
    }
}

/// Cropland of one year, split into rice and the rest.
#[derive(Clone, Debug)]
pub struct YearlyCropland {
    pub year: i32,
    pub rice: Raster,
    pub non_rice: Raster,
}

/// Modelled harvested area of `crop` in the year of `yearly`, before
/// alignment to national statistics.
///
/// Rice copies the yearly rice cropland. Other crops scale the yearly
/// non-rice cropland by the base-year crop ratio. Cells without any
/// base-year crop, or without base-year cropland, take the ratio from
/// their neighbourhood. Cells are then truncated at their surface area.
pub fn build_harea_year(maps: &CropMapSet2000, yearly: &YearlyCropland, crop: CropClass) -> Result<Raster> {
    let spec = maps.spec();
    if yearly.rice.spec != *spec || yearly.non_rice.spec != *spec {
        return Err(Error::invalid(format!("cropland of {} is on a different grid", yearly.year)));
    }
    let row_area = spec.row_areas_ha();
    let mut out = if crop.is_rice() {
        yearly.rice.values.clone()
    } else {
        let base = maps.crop(crop)?;
        let cnr = &yearly.non_rice.values;
        let c2000 = &maps.cropland_nr.values;
        let mut v = vec![0.0; spec.len()];
        let mut new_land = Vec::new();
        for i in 0..spec.len() {
            let c = cnr[i];
            if c.is_nan() {
                v[i] = f64::NAN;
            } else if c > 0.0 {
                if maps.cultivated(i) && c2000[i] > 0.0 {
                    let h = base.values[i];
                    v[i] = if h.is_nan() { 0.0 } else { c / c2000[i] * h };
                } else {
                    new_land.push(i);
                }
            }
        }
        if !new_land.is_empty() {
            let index = NeighborIndex::new(base, &maps.cropland_nr)?;
            for i in new_land {
                v[i] = cnr[i] * index.ratio(i, &RINGS);
            }
        }
        v
    };
    for (i, v) in out.iter_mut().enumerate() {
        let cap = row_area[i / spec.n_cols];
        if *v > cap {
            *v = cap;
        }
    }
    Raster::new(spec.clone(), out, "ha")
}

/// Truncates cells whose total over `layers` exceeds the cell area,
/// shrinking every layer of the cell by the same factor. Returns the
/// number of cells touched.
pub fn cap_cell_totals(layers: &mut [Raster]) -> Result<usize> {
    let Some(first) = layers.first() else { return Ok(0) };
    let spec = first.spec.clone();
    if layers.iter().any(|l| l.spec != spec) {
        return Err(Error::invalid("crop layers do not share a grid"));
    }
    let row_area = spec.row_areas_ha();
    let mut touched = 0;
    for i in 0..spec.len() {
        let total: f64 = layers.iter().map(|l| l.values[i]).filter(|v| !v.is_nan()).sum();
        let cap = row_area[i / spec.n_cols];
        if total > cap {
            let f = cap / total;
            for l in layers.iter_mut() {
                l.values[i] *= f;
            }
            touched += 1;
        }
    }
    Ok(touched)
}
