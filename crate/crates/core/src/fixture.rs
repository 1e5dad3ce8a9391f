//! Synthetic inputs for tests, examples and desk-scale pipeline runs.
//!
//! [`ToyWorld`] is a 20×20 grid shared by ten single-country blocks with
//! thirteen crops over five years, plus every table the pipeline reads.
//! Raster values are rounded to `f32` so files round-trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{CropClass, Nutrient};
use crate::downscale::{CountryFraction, CropMapSet2000, DownscaleInputs, YearlyCropland};
use crate::error::Result;
use crate::gbdt::{ColumnKind, FeatureMatrix};
use crate::geo::{GridSpec, Raster};
use crate::grassland::{apply_country_rule, AreaSeries, CountryRule, RuleData, ShareObservation};
use crate::reconcile::{BudgetTotal, NationalAreas};
use crate::validate::Measure;

fn f32r(v: f64) -> f64 {
    v as f32 as f64
}

/// Regression task with redundant features: each latent driver is seen
/// through two columns, so a single missing cell rarely hides it.
/// Column 4 carries a weak linear effect.
pub fn synthetic_regression(n_rows: usize, missing: f64, seed: u64) -> (FeatureMatrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n_rows * 5);
    let mut y = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let z: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        let x = [z[0], z[0] + rng.gen_range(-0.02..0.02), z[1], z[1].exp(), z[2]];
        let noise: f64 = rng.gen_range(-0.5..0.5);
        y.push(5.0 * (2.0 * std::f64::consts::PI * z[0]).sin() + 24.0 * (z[1] - 0.5).powi(2) + z[2] + noise);
        for v in x {
            values.push(if rng.gen_bool(missing) { f64::NAN } else { v });
        }
    }
    let m = FeatureMatrix::new(n_rows, 5, values, vec![ColumnKind::Numeric; 5]).expect("consistent shape");
    (m, y)
}

/// Report years of the reconstructed Austrian N series.
pub const AUSTRIA_REPORT_YEARS: [i32; 12] = [1977, 1987, 1990, 1993, 1995, 1998, 2001, 2004, 2007, 2010, 2013, 2016];

/// Mean grassland/fodder intensity ratio used for Austrian N.
pub const AUSTRIA_MEAN_R_N: f64 = 0.33;

/// Reconstructed Austrian grassland surfaces (1961–2020) and N reports.
///
/// Only summary statistics of the original comparison are known: the
/// constant-ratio estimate misses the reports by 2.33 ± 3.09 percentage
/// points with an 11.8 point underestimate in 1977. Surfaces follow a
/// smooth decline and the reports are placed at those distances from the
/// estimate, so this fixture exercises the machinery rather than supplying
/// independent evidence.
pub fn austria_n() -> (AreaSeries, Vec<ShareObservation>) {
    let areas: AreaSeries = (1961..=2020)
        .map(|y| {
            let t = f64::from(y - 1961);
            let a_a = 3.6e6 - 15_000.0 * t;
            (y, (a_a * (0.62 - 0.002 * t), a_a))
        })
        .collect();
    // Percentage-point errors (report minus estimate).
    let errors = [11.8, -0.229, 0.435, -0.642, 0.952, -1.262, 1.469, -1.676, 1.986, -2.296, 2.503, -2.709];
    let q_a = 150_000.0;
    let obs = AUSTRIA_REPORT_YEARS
        .iter()
        .zip(errors)
        .map(|(&year, e)| {
            let (a_f, a_a) = areas[&year];
            let share = AUSTRIA_MEAN_R_N * a_f / a_a + e / 100.0;
            ShareObservation { country: "AUT".into(), nutrient: Nutrient::N, year, q_f: share * q_a, q_a, a_f, a_a }
        })
        .collect();
    (areas, obs)
}

/// Piecewise Austrian N rule: constant ratio outside 1970–1990 and the
/// mean ratio of the 1977 and 1990 reports inside it.
pub const AUSTRIA_RULE: &str = r#"country = "AUT"
note = "reconstructed fixture"

[[nutrient]]
nutrient = "N"

[[nutrient.segment]]
from = 1961
to = 1969
method = "mean_r"
value = 0.33

[[nutrient.segment]]
from = 1970
to = 1990
method = "mean_r"
obs_years = [1977, 1990]
note = "mean ratio of the 1977 and 1990 reports"

[[nutrient.segment]]
from = 1991
to = 2020
method = "mean_r"
value = 0.33
"#;

/// Years of the toy world.
pub const TOY_YEARS: [i32; 5] = [1998, 1999, 2000, 2001, 2002];

/// Survey row as written to the toy `rates.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurveyRow {
    pub country: String,
    pub crop: CropClass,
    pub year: String,
    pub nutrient: &'static str,
    pub rate: Option<f64>,
    pub fertilized_share: Option<f64>,
    pub rate_on_fertilized: Option<f64>,
    pub source_date: String,
    pub exclude: bool,
}

/// Every input of a desk-scale pipeline run.
pub struct ToyWorld {
    pub seed: u64,
    pub years: Vec<i32>,
    pub countries: Vec<String>,
    pub downscale: DownscaleInputs,
    pub national_areas: NationalAreas,
    /// Ground-truth rates, kg/ha.
    pub truth: BTreeMap<(String, CropClass, i32, Nutrient), f64>,
    pub survey: Vec<SurveyRow>,
    pub feature_names: Vec<String>,
    pub feature_rows: Vec<Vec<Option<String>>>,
    pub budgets: Vec<BudgetTotal>,
    pub share_areas: BTreeMap<String, AreaSeries>,
    pub share_observations: Vec<ShareObservation>,
    pub rules: Vec<(String, String)>,
    pub reference: Vec<(String, CropClass, i32, Measure, f64)>,
}

const N_ROWS: usize = 20;
const N_COLS: usize = 20;

fn crop_factor(c: CropClass) -> f64 {
    match c {
        CropClass::Wheat => 1.0,
        CropClass::Maize => 1.4,
        CropClass::Rice => 1.2,
        CropClass::OtherCereals => 0.6,
        CropClass::Soybean => 0.3,
        CropClass::PalmOilFruit => 0.9,
        CropClass::OtherOilseeds => 0.8,
        CropClass::Vegetables => 1.8,
        CropClass::Fruits => 1.1,
        CropClass::RootsAndTubers => 1.3,
        CropClass::SugarCrops => 1.5,
        CropClass::FiberCrops => 1.0,
        CropClass::OtherCrops => 0.5,
    }
}

impl ToyWorld {
    pub fn generate(seed: u64) -> Result<ToyWorld> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = GridSpec::new(N_ROWS, N_COLS, 0.25, 5.0, 10.0)?;
        let row_area = spec.row_areas_ha();
        let countries: Vec<String> = (0..10).map(|i| format!("C{i:02}")).collect();
        let country_of = |i: usize| {
            let (r, c) = spec.row_col(i);
            (r / 4) * 2 + c / 10
        };

        // Base year: cropland share of each cell, with a few nearly full
        // cells and a few uncultivated ones that open up later.
        let mut cropland_nr = vec![0.0; spec.len()];
        let mut rice = vec![0.0; spec.len()];
        let mut crops: BTreeMap<CropClass, Vec<f64>> = CropClass::ALL.iter().map(|c| (*c, vec![0.0; spec.len()])).collect();
        let mut new_land = vec![false; spec.len()];
        // Cells whose cropland keeps expanding after the base year until
        // their harvested area overflows the cell.
        let mut expanding = vec![false; spec.len()];
        for i in 0..spec.len() {
            let area = row_area[i / N_COLS];
            let u: f64 = rng.gen();
            if u < 0.04 {
                new_land[i] = true;
                continue;
            }
            expanding[i] = u < 0.07;
            let share = if u < 0.1 { 0.9 } else { rng.gen_range(0.1..0.4) };
            cropland_nr[i] = f32r(area * share);
            rice[i] = f32r(area * 0.04 * rng.gen::<f64>());
            let weights: Vec<f64> = (0..12).map(|_| rng.gen_range(0.2..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for (c, w) in CropClass::ALL.iter().filter(|c| !c.is_rice()).zip(&weights) {
                crops.get_mut(c).unwrap()[i] = f32r(cropland_nr[i] * 0.95 * w / total);
            }
        }
        crops.insert(CropClass::Rice, rice.clone());

        let mut cropland = BTreeMap::new();
        let mut growth: BTreeMap<(usize, i32), f64> = BTreeMap::new();
        for &y in &TOY_YEARS {
            for j in 0..countries.len() {
                let g = if y == 2000 { 1.0 } else { 1.0 + 0.01 * f64::from(y - 2000) + rng.gen_range(-0.005..0.005) };
                growth.insert((j, y), g);
            }
            let mut nr = vec![0.0; spec.len()];
            let mut rc = vec![0.0; spec.len()];
            for i in 0..spec.len() {
                let g = growth[&(country_of(i), y)];
                if new_land[i] {
                    if y > 2000 {
                        nr[i] = f32r(row_area[i / N_COLS] * 0.05 * f64::from(y - 2000));
                    }
                } else if expanding[i] && y > 2000 {
                    nr[i] = f32r(cropland_nr[i] * (1.0 + 0.12 * f64::from(y - 2000)));
                    rc[i] = rice[i];
                } else {
                    nr[i] = f32r(cropland_nr[i] * g);
                    rc[i] = f32r(rice[i] * g);
                }
            }
            cropland.insert(
                y,
                YearlyCropland { year: y, rice: Raster::new(spec.clone(), rc, "ha")?, non_rice: Raster::new(spec.clone(), nr, "ha")? },
            );
        }

        let fracs: Vec<CountryFraction> = countries
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let v = (0..spec.len()).map(|i| if country_of(i) == j { 1.0 } else { 0.0 }).collect();
                Ok(CountryFraction { country: name.clone(), frac: Raster::new(spec.clone(), v, "1")? })
            })
            .collect::<Result<_>>()?;
        let base = crops
            .iter()
            .map(|(c, v)| Ok((*c, Raster::new(spec.clone(), v.clone(), "ha")?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let maps = CropMapSet2000::new(base, Raster::new(spec.clone(), cropland_nr.clone(), "ha")?)?;

        // National harvested areas: base-year sums carried by growth with
        // noise; exactly the base sums in 2000.
        let mut national = NationalAreas::new();
        for (j, name) in countries.iter().enumerate() {
            for c in CropClass::ALL {
                let base_sum: f64 = (0..spec.len()).filter(|&i| country_of(i) == j).map(|i| crops[&c][i]).sum();
                for &y in &TOY_YEARS {
                    // The last year outgrows the modelled cropland, so
                    // alignment has to saturate cells.
                    let a = match y {
                        2000 => base_sum,
                        2002 => base_sum * growth[&(j, y)] * rng.gen_range(1.15..1.25),
                        _ => base_sum * growth[&(j, y)] * rng.gen_range(0.96..1.06),
                    };
                    national.insert((name.clone(), c, y), a);
                }
            }
        }
        let downscale = DownscaleInputs::new(maps, cropland, fracs)?;

        // Country and crop covariates.
        struct Country {
            gdp: f64,
            irrigation: f64,
            map: f64,
            mat: f64,
            ph: f64,
        }
        let cinfo: Vec<Country> = (0..countries.len())
            .map(|_| Country {
                gdp: rng.gen_range(800.0..45_000.0),
                irrigation: rng.gen_range(0.0..60.0),
                map: rng.gen_range(300.0..2000.0),
                mat: rng.gen_range(5.0..27.0),
                ph: rng.gen_range(4.5..8.0),
            })
            .collect();
        let nut_base = [(Nutrient::N, 90.0), (Nutrient::P2O5, 40.0), (Nutrient::K2O, 35.0)];
        let prices = [("urea_price", 300.0), ("p_rock_price", 90.0), ("k_price", 250.0)];

        let mut truth = BTreeMap::new();
        let feature_names: Vec<String> = [
            "country", "crop", "year", "map", "mat", "aridity", "soil_ph", "crop_area", "irrigation", "gdp_per_capita",
            "country_n_per_ha", "country_p_per_ha", "country_k_per_ha", "urea_price", "p_rock_price", "k_price",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let mut feature_rows = Vec::new();
        for (j, name) in countries.iter().enumerate() {
            let ci = &cinfo[j];
            let wealth = ci.gdp / (ci.gdp + 6000.0);
            for c in CropClass::ALL {
                for &y in &TOY_YEARS {
                    let trend = 1.0 + 0.02 * f64::from(y - 2000);
                    let mut per_ha = [0.0; 3];
                    for (k, (n, b)) in nut_base.iter().enumerate() {
                        let soil = if *n == Nutrient::N { 1.0 } else { 1.0 + 0.15 * (6.5 - ci.ph) };
                        let r = b * crop_factor(c) * (0.3 + wealth) * (1.0 + ci.irrigation / 100.0) * soil * trend;
                        truth.insert((name.clone(), c, y, *n), r);
                        per_ha[k] = r * 0.001 * rng.gen_range(0.8..1.2);
                    }
                    let mut maybe = |v: f64, p: f64| (!rng.gen_bool(p)).then(|| format!("{v:.4}"));
                    let row = vec![
                        Some(name.clone()),
                        Some(c.file_name().to_string()),
                        Some(y.to_string()),
                        maybe(ci.map, 0.05),
                        maybe(ci.mat, 0.05),
                        maybe(ci.map / 1400.0, 0.1),
                        maybe(ci.ph, 0.1),
                        maybe(national[&(name.clone(), c, y)], 0.0),
                        maybe(ci.irrigation, 0.15),
                        maybe(ci.gdp, 0.05),
                        maybe(per_ha[0], 0.1),
                        maybe(per_ha[1], 0.1),
                        maybe(per_ha[2], 0.1),
                        maybe(prices[0].1 * trend, 0.0),
                        maybe(prices[1].1 * trend, 0.0),
                        maybe(prices[2].1 * trend, 0.0),
                    ];
                    feature_rows.push(row);
                }
            }
        }

        // Survey: about 70% of keys carry all three nutrients; a few carry
        // two. Extras exercise harmonisation, elemental units, superseded
        // and excluded rows, and the anomaly filter.
        let mut survey = Vec::new();
        for name in &countries {
            for c in CropClass::ALL {
                for &y in &TOY_YEARS {
                    let u: f64 = rng.gen();
                    if u > 0.78 {
                        continue;
                    }
                    let partial = u > 0.72;
                    for (n, _) in nut_base {
                        if partial && n == Nutrient::K2O {
                            continue;
                        }
                        let r = truth[&(name.clone(), c, y, n)] * rng.gen_range(0.93..1.07);
                        let season = if rng.gen_bool(0.1) { format!("{y}/{:02}", (y + 1) % 100) } else { y.to_string() };
                        let mut row = SurveyRow {
                            country: name.clone(),
                            crop: c,
                            year: season,
                            nutrient: n.as_str(),
                            rate: Some(r),
                            fertilized_share: None,
                            rate_on_fertilized: None,
                            source_date: format!("20{:02}-01-01", 5 + rng.gen_range(0..10)),
                            exclude: false,
                        };
                        let v: f64 = rng.gen();
                        if v < 0.08 {
                            let share = rng.gen_range(0.5..1.0);
                            row.rate = None;
                            row.fertilized_share = Some(share);
                            row.rate_on_fertilized = Some(r / share);
                        } else if v < 0.12 && n != Nutrient::N {
                            let factor = if n == Nutrient::P2O5 { crate::features::Element::P } else { crate::features::Element::K }.oxide_factor();
                            row.nutrient = if n == Nutrient::P2O5 { "P" } else { "K" };
                            row.rate = Some(r / factor);
                        }
                        if v > 0.97 {
                            let mut old = row.clone();
                            old.source_date = "1999-01-01".into();
                            old.rate = Some(r * 3.0);
                            old.fertilized_share = None;
                            old.rate_on_fertilized = None;
                            old.nutrient = n.as_str();
                            survey.push(old);
                        }
                        survey.push(row);
                    }
                }
            }
        }
        survey.push(SurveyRow {
            country: countries[0].clone(),
            crop: CropClass::Maize,
            year: "2001".into(),
            nutrient: "N",
            rate: Some(60.0),
            fertilized_share: None,
            rate_on_fertilized: None,
            source_date: "2030-01-01".into(),
            exclude: true,
        });
        survey.push(SurveyRow {
            country: countries[1].clone(),
            crop: CropClass::Vegetables,
            year: "1998".into(),
            nutrient: "N",
            rate: Some(6000.0),
            fertilized_share: None,
            rate_on_fertilized: None,
            source_date: "2030-01-01".into(),
            exclude: false,
        });

        // Grassland shares: surfaces per country and a rule per country.
        let share_years = 1990..=2010;
        let mut share_areas = BTreeMap::new();
        let mut share_observations = Vec::new();
        for (j, name) in countries.iter().enumerate() {
            let a_a = rng.gen_range(1e6..5e6);
            let frac0 = rng.gen_range(0.25..0.6);
            let s: AreaSeries = share_years
                .clone()
                .map(|y| (y, (f32r(a_a * (frac0 - 0.003 * f64::from(y - 1990))), f32r(a_a))))
                .collect();
            for n in Nutrient::ALL {
                for &y in &[1993, 1997, 2003, 2008] {
                    let (a_f, a_a) = s[&y];
                    let r = 0.2 + 0.05 * j as f64 + rng.gen_range(-0.03..0.03);
                    let q_a = 1e5;
                    share_observations.push(ShareObservation {
                        country: name.clone(),
                        nutrient: n,
                        year: y,
                        q_f: f32r(r * a_f / a_a * q_a),
                        q_a,
                        a_f,
                        a_a,
                    });
                }
            }
            share_areas.insert(name.clone(), s);
        }
        let mut rules = Vec::new();
        for (j, name) in countries.iter().enumerate() {
            let body = match j % 5 {
                0 => "method = \"fixed\"\nvalue = 0.0\nnote = \"no grassland fertilization\"\n".to_string(),
                1 => "method = \"mean_r\"\nnote = \"mean ratio of all reports\"\n".to_string(),
                2 => "method = \"interp_r\"\nanchors = [{ year = 1990, share = 0.0 }]\nnote = \"rise from zero\"\n".to_string(),
                3 => "method = \"blend\"\na = { method = \"fixed\" }\nb = { method = \"mean_r\" }\nnote = \"average of shares and ratios\"\n".to_string(),
                _ => "method = \"mean_r\"\nvalue = 0.25\nnote = \"assumed ratio\"\n".to_string(),
            };
            let mut text = format!("country = \"{name}\"\n");
            for n in Nutrient::ALL {
                write!(text, "\n[[nutrient]]\nnutrient = \"{n}\"\n\n[[nutrient.segment]]\nfrom = 1990\nto = 2010\n{body}").unwrap();
            }
            rules.push((name.clone(), text));
        }
        let mut shares = BTreeMap::new();
        let data = RuleData { areas: &share_areas, observations: &share_observations };
        for (_, text) in &rules {
            let rule = CountryRule::from_toml(text, Path::new("toy rule"))?;
            for out in apply_country_rule(&rule, &data)? {
                for p in out.series.points {
                    shares.insert((out.series.country.clone(), out.series.nutrient, p.year), p.share);
                }
            }
        }

        // Budgets: the true crop totals grossed up by the grassland share.
        let mut budgets = Vec::new();
        for name in &countries {
            for n in Nutrient::ALL {
                for &y in &TOY_YEARS {
                    let crop_t: f64 = CropClass::ALL
                        .iter()
                        .map(|&c| truth[&(name.clone(), c, y, n)] * national[&(name.clone(), c, y)] / 1000.0)
                        .sum();
                    let s = shares[&(name.clone(), n, y)];
                    let total = crop_t / (1.0 - s) * rng.gen_range(0.95..1.05);
                    budgets.push(BudgetTotal { country: name.clone(), nutrient: n, year: y, total_use: total });
                }
            }
        }

        // Reference series for validation.
        let mut reference = Vec::new();
        for (name, crop) in [(0, CropClass::Maize), (0, CropClass::Wheat), (3, CropClass::Rice), (6, CropClass::SugarCrops)] {
            for &y in &TOY_YEARS {
                let key = |n| truth[&(countries[name].clone(), crop, y, n)];
                if name == 6 {
                    let total = Nutrient::ALL.iter().map(|&n| key(n)).sum::<f64>();
                    reference.push((countries[name].clone(), crop, y, Measure::Npk, total * rng.gen_range(0.85..1.15)));
                } else {
                    for n in Nutrient::ALL {
                        reference.push((countries[name].clone(), crop, y, Measure::Nutrient(n), key(n) * rng.gen_range(0.85..1.15)));
                    }
                }
            }
        }

        Ok(ToyWorld {
            seed,
            years: TOY_YEARS.to_vec(),
            countries,
            downscale,
            national_areas: national,
            truth,
            survey,
            feature_names,
            feature_rows,
            budgets,
            share_areas,
            share_observations,
            rules,
            reference,
        })
    }

    /// Writes the world as a pipeline input directory with `config.toml`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir.join("rules"))?;
        self.downscale.write(&dir.join("rasters"))?;

        let mut w = csv::Writer::from_path(dir.join("rates.csv"))?;
        w.write_record(["country", "crop", "year", "nutrient", "rate", "fertilized_share", "rate_on_fertilized", "source_date", "exclude"])?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.4}"));
        for r in &self.survey {
            w.write_record([
                r.country.clone(),
                r.crop.label().to_string(),
                r.year.clone(),
                r.nutrient.to_string(),
                opt(r.rate),
                opt(r.fertilized_share),
                opt(r.rate_on_fertilized),
                r.source_date.clone(),
                if r.exclude { "true".into() } else { String::new() },
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("features.csv"))?;
        w.write_record(&self.feature_names)?;
        for row in &self.feature_rows {
            w.write_record(row.iter().map(|c| c.clone().unwrap_or_default()))?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("national_areas.csv"))?;
        w.write_record(["country", "crop", "year", "area_ha"])?;
        for ((c, k, y), a) in &self.national_areas {
            w.write_record([c.clone(), k.file_name().to_string(), y.to_string(), format!("{a:?}")])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("budgets.csv"))?;
        w.write_record(["country", "nutrient", "year", "total_use"])?;
        for b in &self.budgets {
            w.write_record([b.country.clone(), b.nutrient.to_string(), b.year.to_string(), format!("{:.3}", b.total_use)])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("grass_areas.csv"))?;
        w.write_record(["country", "year", "a_f", "a_a"])?;
        for (c, s) in &self.share_areas {
            for (y, (a_f, a_a)) in s {
                w.write_record([c.clone(), y.to_string(), format!("{a_f:?}"), format!("{a_a:?}")])?;
            }
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("grass_observations.csv"))?;
        for o in &self.share_observations {
            w.serialize(o)?;
        }
        w.flush()?;

        for (c, text) in &self.rules {
            std::fs::write(dir.join("rules").join(format!("{c}.toml")), text)?;
        }

        let mut w = csv::Writer::from_path(dir.join("reference.csv"))?;
        w.write_record(["country", "crop", "year", "measure", "value"])?;
        for (c, k, y, m, v) in &self.reference {
            w.write_record([c.clone(), k.label().to_string(), y.to_string(), m.to_string(), format!("{v:.3}")])?;
        }
        w.flush()?;

        std::fs::write(dir.join("config.toml"), self.config_text())?;
        Ok(())
    }

    /// Pipeline configuration for this world, paths relative to its file.
    pub fn config_text(&self) -> String {
        let years: Vec<String> = self.years.iter().map(|y| y.to_string()).collect();
        format!(
            r#"# Desk-scale run over the toy world.
seed = {seed}
out_dir = "out"
years = [{years}]

[inputs]
rates = "rates.csv"
features = "features.csv"
share_areas = "grass_areas.csv"
share_observations = "grass_observations.csv"
share_rules = "rules"
budgets = "budgets.csv"
national_areas = "national_areas.csv"
rasters = "rasters"
reference = "reference.csv"

[grid]
n_rows = {nr}
n_cols = {nc}
cell_size = 0.25
origin_lat = 5.0
origin_lon = 10.0

[train]
model = "HGB"
k_outer = 2
k_inner = 3
axes = [["max_depth", [3.0, 5.0]], ["learning_rate", [0.1]], ["n_trees", [150.0]], ["min_samples_leaf", [5.0]]]

[train.base]
max_bins = 64
"#,
            seed = self.seed,
            years = years.join(", "),
            nr = N_ROWS,
            nc = N_COLS,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassland::{evaluate_share_mae, share_from_mean_r};

    #[test]
    fn austria_reconstruction_matches_reported_error() {
        let (areas, obs) = austria_n();
        let est = share_from_mean_r(AUSTRIA_MEAN_R_N, &areas).unwrap();
        let reported: Vec<(i32, f64)> = obs.iter().map(|o| (o.year, o.share())).collect();
        let e = evaluate_share_mae(&est, &reported).unwrap();
        assert!((e.mean - 2.33).abs() < 0.01, "{e:?}");
        assert!((e.sd - 3.09).abs() < 0.01, "{e:?}");
    }

    #[test]
    fn toy_world_is_deterministic() {
        let a = ToyWorld::generate(5).unwrap();
        let b = ToyWorld::generate(5).unwrap();
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.national_areas, b.national_areas);
        assert_eq!(a.feature_rows.len(), 10 * 13 * 5);
    }
}
