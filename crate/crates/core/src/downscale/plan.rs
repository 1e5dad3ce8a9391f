use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::align::{align_layers_named, AlignStats};
use super::harvest::{build_harea_year, cap_cell_totals, CropMapSet2000, YearlyCropland};
use super::output::{layer_file_name, sha256_file, ManifestEntry};
use crate::domain::{CropClass, Nutrient};
use crate::error::{Error, Result};
use crate::geo::{GridSpec, Raster};
use crate::reconcile::{AdjustedRate, NationalAreas};

/// Share of every cell covered by one country.
#[derive(Clone, Debug)]
pub struct CountryFraction {
    pub country: String,
    pub frac: Raster,
}

/// Every raster the downscaling reads.
///
/// On disk, relative to one directory: `base/{Crop}.tiff`,
/// `base/cropland_nr.tiff`, `cropland/rice_{year}.tiff`,
/// `cropland/nonrice_{year}.tiff` and `countries/{code}.tiff`.
#[derive(Clone, Debug)]
pub struct DownscaleInputs {
    pub maps: CropMapSet2000,
    pub cropland: BTreeMap<i32, YearlyCropland>,
    pub countries: Vec<CountryFraction>,
}

fn read_layer(path: PathBuf) -> Result<Raster> {
    if !path.exists() {
        return Err(Error::Missing(format!("raster {}", path.display())));
    }
    Raster::read_geotiff(&path)
}

impl DownscaleInputs {
    pub fn new(maps: CropMapSet2000, cropland: BTreeMap<i32, YearlyCropland>, countries: Vec<CountryFraction>) -> Result<Self> {
        let spec = maps.spec();
        for c in &countries {
            if c.frac.spec != *spec {
                return Err(Error::invalid(format!("country layer {} is on a different grid", c.country)));
            }
        }
        for (y, l) in &cropland {
            if l.rice.spec != *spec || l.non_rice.spec != *spec {
                return Err(Error::invalid(format!("cropland of {y} is on a different grid")));
            }
        }
        Ok(DownscaleInputs { maps, cropland, countries })
    }

    pub fn load(dir: &Path, years: &[i32]) -> Result<Self> {
        let mut crops = BTreeMap::new();
        for c in CropClass::ALL {
            crops.insert(c, read_layer(dir.join("base").join(format!("{}.tiff", c.file_name())))?);
        }
        let maps = CropMapSet2000::new(crops, read_layer(dir.join("base/cropland_nr.tiff"))?)?;
        let mut cropland = BTreeMap::new();
        for &y in years {
            cropland.insert(
                y,
                YearlyCropland {
                    year: y,
                    rice: read_layer(dir.join(format!("cropland/rice_{y}.tiff")))?,
                    non_rice: read_layer(dir.join(format!("cropland/nonrice_{y}.tiff")))?,
                },
            );
        }
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir.join("countries"))
            .map_err(|e| Error::Missing(format!("{}: {e}", dir.join("countries").display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "tiff" || x == "tif"))
            .collect();
        paths.sort();
        let countries = paths
            .into_iter()
            .map(|p| {
                let country = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                Ok(CountryFraction { country, frac: read_layer(p)? })
            })
            .collect::<Result<Vec<_>>>()?;
        DownscaleInputs::new(maps, cropland, countries)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        for sub in ["base", "cropland", "countries"] {
            std::fs::create_dir_all(dir.join(sub))?;
        }
        for (c, r) in &self.maps.crops {
            r.write_geotiff(&dir.join("base").join(format!("{}.tiff", c.file_name())))?;
        }
        self.maps.cropland_nr.write_geotiff(&dir.join("base/cropland_nr.tiff"))?;
        for (y, l) in &self.cropland {
            l.rice.write_geotiff(&dir.join(format!("cropland/rice_{y}.tiff")))?;
            l.non_rice.write_geotiff(&dir.join(format!("cropland/nonrice_{y}.tiff")))?;
        }
        for c in &self.countries {
            c.frac.write_geotiff(&dir.join("countries").join(format!("{}.tiff", c.country)))?;
        }
        Ok(())
    }

    pub fn spec(&self) -> &GridSpec {
        self.maps.spec()
    }

    /// Cells covered by at least one country.
    pub fn land_mask(&self) -> Vec<bool> {
        (0..self.spec().len())
            .map(|i| self.countries.iter().any(|c| c.frac.values[i] > 0.0))
            .collect()
    }
}

/// One crop's aligned harvested area inside one country, on the cells the
/// country covers.
#[derive(Clone, Debug, PartialEq)]
pub struct CountryLayer {
    pub cells: Vec<usize>,
    pub area: Vec<f64>,
}

/// Aligned harvested areas of every crop and country for one year.
#[derive(Clone, Debug)]
pub struct YearAreas {
    pub year: i32,
    pub spec: GridSpec,
    pub land: Vec<bool>,
    pub layers: BTreeMap<(String, CropClass), CountryLayer>,
    /// Cells truncated before alignment.
    pub pre_capped: usize,
    pub align: AlignStats,
}

impl YearAreas {
    /// Harvested area of `crop` summed over countries, nodata off land.
    pub fn crop_raster(&self, crop: CropClass) -> Raster {
        let mut r = Raster::filled(&self.spec, f64::NAN, "ha");
        for (i, l) in self.land.iter().enumerate() {
            if *l {
                r.values[i] = 0.0;
            }
        }
        for ((_, c), layer) in &self.layers {
            if *c == crop {
                for (&i, a) in layer.cells.iter().zip(&layer.area) {
                    r.values[i] += a;
                }
            }
        }
        r
    }
}

fn with_context(e: Error, ctx: &str) -> Error {
    match e {
        Error::Infeasible(m) => Error::Infeasible(format!("{ctx}: {m}")),
        Error::Invalid(m) => Error::Invalid(format!("{ctx}: {m}")),
        Error::Missing(m) => Error::Missing(format!("{ctx}: {m}")),
        other => other,
    }
}

/// Builds, caps and aligns the harvested areas of every crop for `year`.
///
/// Each country receives the share `harea·frac` of a cell, with capacity
/// `cell_area·frac`, and is aligned to its national totals independently.
pub fn harvested_areas(inputs: &DownscaleInputs, year: i32, national: &NationalAreas) -> Result<YearAreas> {
    let yearly = inputs
        .cropland
        .get(&year)
        .ok_or_else(|| Error::Missing(format!("cropland layers for {year}")))?;
    let mut crops: Vec<Raster> = CropClass::ALL
        .par_iter()
        .map(|&c| build_harea_year(&inputs.maps, yearly, c))
        .collect::<Result<_>>()?;
    let pre_capped = cap_cell_totals(&mut crops)?;
    let spec = inputs.spec();
    let row_area = spec.row_areas_ha();
    let names: Vec<String> = CropClass::ALL.iter().map(|c| c.file_name().to_string()).collect();

    let per_country: Vec<(String, Vec<usize>, Vec<Vec<f64>>, AlignStats)> = inputs
        .countries
        .par_iter()
        .map(|cf| {
            let ctx = format!("{} {year}", cf.country);
            let cells: Vec<usize> = (0..spec.len()).filter(|&i| cf.frac.values[i] > 0.0).collect();
            let caps: Vec<f64> = cells.iter().map(|&i| row_area[i / spec.n_cols] * cf.frac.values[i]).collect();
            let mut layers: Vec<Vec<f64>> = crops
                .iter()
                .map(|r| {
                    cells
                        .iter()
                        .map(|&i| {
                            let h = r.values[i];
                            if h.is_nan() { 0.0 } else { h * cf.frac.values[i] }
                        })
                        .collect()
                })
                .collect();
            let targets = CropClass::ALL
                .iter()
                .map(|&c| {
                    national
                        .get(&(cf.country.clone(), c, year))
                        .copied()
                        .ok_or_else(|| Error::Missing(format!("national harvested area for {} {} {year}", cf.country, c.file_name())))
                })
                .collect::<Result<Vec<_>>>()?;
            let stats = align_layers_named(&mut layers, &targets, &caps, &names).map_err(|e| with_context(e, &ctx))?;
            Ok((cf.country.clone(), cells, layers, stats))
        })
        .collect::<Result<_>>()?;

    let mut out = YearAreas {
        year,
        spec: spec.clone(),
        land: inputs.land_mask(),
        layers: BTreeMap::new(),
        pre_capped,
        align: AlignStats::default(),
    };
    for (country, cells, layers, stats) in per_country {
        out.align.rounds = out.align.rounds.max(stats.rounds);
        out.align.capped += stats.capped;
        for (c, area) in CropClass::ALL.iter().zip(layers) {
            out.layers.insert((country.clone(), *c), CountryLayer { cells: cells.clone(), area });
        }
    }
    Ok(out)
}

/// Adjusted rates keyed by (country, crop, year, nutrient), kg/ha.
pub type RateTable = BTreeMap<(String, CropClass, i32, Nutrient), f64>;

pub fn rate_table(rows: &[AdjustedRate]) -> RateTable {
    rows.iter()
        .map(|r| ((r.country.clone(), r.crop, r.year, r.nutrient), r.rate_adjusted))
        .collect()
}

/// Fertilizer mass of one crop and nutrient, kg per cell: the sum over
/// countries of rate times the country's aligned area. Equivalent to
/// `fertilizer_raster` when each country layer is `harea·frac`.
pub fn fertilizer_layer(areas: &YearAreas, rates: &RateTable, crop: CropClass, nutrient: Nutrient) -> Result<Raster> {
    let mut r = Raster::filled(&areas.spec, f64::NAN, "kg");
    for (i, l) in areas.land.iter().enumerate() {
        if *l {
            r.values[i] = 0.0;
        }
    }
    for ((country, c), layer) in &areas.layers {
        if *c != crop || layer.area.iter().all(|a| *a == 0.0) {
            continue;
        }
        let rate = *rates.get(&(country.clone(), crop, areas.year, nutrient)).ok_or_else(|| {
            Error::Missing(format!("adjusted {nutrient} rate for {country} {} {}", crop.file_name(), areas.year))
        })?;
        for (&i, a) in layer.cells.iter().zip(&layer.area) {
            r.values[i] += rate * a;
        }
    }
    Ok(r)
}

/// Per-year alignment counters, for logs.
#[derive(Clone, Debug, PartialEq)]
pub struct YearReport {
    pub year: i32,
    pub pre_capped: usize,
    pub align: AlignStats,
}

/// Writes every `{Crop}{Nutrient}{Year}.tiff` for `years` into `out_dir`
/// and returns their manifest entries, sorted by file name.
pub fn downscale_to_dir(
    inputs: &DownscaleInputs,
    years: &[i32],
    national: &NationalAreas,
    rates: &RateTable,
    out_dir: &Path,
) -> Result<(Vec<ManifestEntry>, Vec<YearReport>)> {
    std::fs::create_dir_all(out_dir)?;
    let mut entries = Vec::new();
    let mut reports = Vec::new();
    for &year in years {
        let areas = harvested_areas(inputs, year, national)?;
        reports.push(YearReport { year, pre_capped: areas.pre_capped, align: areas.align });
        let jobs: Vec<(CropClass, Nutrient)> =
            CropClass::ALL.iter().flat_map(|&c| Nutrient::ALL.iter().map(move |&n| (c, n))).collect();
        let mut done: Vec<ManifestEntry> = jobs
            .par_iter()
            .map(|&(crop, nutrient)| {
                let raster = fertilizer_layer(&areas, rates, crop, nutrient)?;
                let file = layer_file_name(crop, nutrient, year);
                let path = out_dir.join(&file);
                raster.write_geotiff(&path)?;
                Ok(ManifestEntry { total_kg: raster.sum(), sha256: sha256_file(&path)?, file, crop, nutrient, year })
            })
            .collect::<Result<_>>()?;
        entries.append(&mut done);
    }
    entries.sort_by(|a, b| a.file.cmp(&b.file));
    Ok((entries, reports))
}
