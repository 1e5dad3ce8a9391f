//! Scaling predicted crop rates so that each country's crop total matches
//! its national nutrient budget net of grassland and fodder use.
//!
//! A single positive factor `s = budget_kg / Σ(rate·area)` multiplies every
//! crop of a (country, nutrient, year) key. Scaling this way keeps the
//! relative crop proportions and the rate ranking intact. It also makes the
//! adjustment idempotent.

mod io;

use std::collections::BTreeMap;

use crate::domain::{CropClass, Nutrient};
use crate::error::{Error, Result};
use crate::features::RateRecord;

pub use io::{
    read_adjusted, read_budget_totals, read_national_areas, read_rates, write_adjusted, write_budgets, write_rates,
    BudgetTotal, NationalAreas,
};

/// Crop budget after removing the grassland/fodder share, t.
pub fn net_budget(total_use: f64, grass_share: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&grass_share) {
        return Err(Error::invalid(format!("grassland share {grass_share} outside [0, 1]")));
    }
    if !(total_use >= 0.0) {
        return Err(Error::invalid(format!("negative or missing total use {total_use}")));
    }
    Ok(total_use * (1.0 - grass_share))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountryBudget {
    pub country: String,
    pub nutrient: Nutrient,
    pub year: i32,
    /// National agricultural consumption, t.
    pub total_use: f64,
    pub grass_share: f64,
    /// `total_use·(1 − grass_share)`, t.
    pub net_budget: f64,
}

impl CountryBudget {
    pub fn new(country: impl Into<String>, nutrient: Nutrient, year: i32, total_use: f64, grass_share: f64) -> Result<Self> {
        Ok(CountryBudget {
            country: country.into(),
            nutrient,
            year,
            total_use,
            grass_share,
            net_budget: net_budget(total_use, grass_share)?,
        })
    }

    pub fn key(&self) -> (String, Nutrient, i32) {
        (self.country.clone(), self.nutrient, self.year)
    }
}

/// Rates after scaling, with the common factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjustment {
    pub rates: Vec<f64>,
    pub scale: f64,
}

/// Scales `pred_rates` (kg/ha) over `areas` (ha) to a budget in tonnes.
pub fn adjust_predictions(pred_rates: &[f64], areas: &[f64], budget_t: f64) -> Result<Adjustment> {
    if pred_rates.len() != areas.len() {
        return Err(Error::invalid(format!("{} rates for {} areas", pred_rates.len(), areas.len())));
    }
    if pred_rates.iter().chain(areas).any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid("rates and areas must be finite and non-negative"));
    }
    if !(budget_t >= 0.0) {
        return Err(Error::invalid(format!("negative or missing budget {budget_t}")));
    }
    if budget_t == 0.0 {
        return Ok(Adjustment { rates: vec![0.0; pred_rates.len()], scale: 0.0 });
    }
    let total_kg: f64 = pred_rates.iter().zip(areas).map(|(r, a)| r * a).sum();
    if total_kg == 0.0 {
        return Err(Error::invalid("nothing to scale"));
    }
    let scale = budget_t * 1000.0 / total_kg;
    Ok(Adjustment {
        rates: pred_rates.iter().map(|r| r * scale).collect(),
        scale,
    })
}

/// Combines national totals with grassland shares. A country without a
/// share row for a key is an error, never an implicit zero.
pub fn build_budgets(totals: &[BudgetTotal], shares: &BTreeMap<(String, Nutrient, i32), f64>) -> Result<Vec<CountryBudget>> {
    totals
        .iter()
        .map(|t| {
            let share = shares
                .get(&(t.country.clone(), t.nutrient, t.year))
                .ok_or_else(|| Error::Missing(format!("grassland share for {} {} {}", t.country, t.nutrient, t.year)))?;
            CountryBudget::new(t.country.clone(), t.nutrient, t.year, t.total_use, *share)
        })
        .collect()
}

/// One line of the adjusted-rate table.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjustedRate {
    pub country: String,
    pub crop: CropClass,
    pub year: i32,
    pub nutrient: Nutrient,
    pub rate_raw: f64,
    pub rate_adjusted: f64,
    pub scale: f64,
}

/// Adjusts every predicted key that has a budget. Crops of the key lacking
/// a national harvested area are an error; crops with zero area take part
/// with zero weight.
pub fn reconcile_all(predictions: &[RateRecord], areas: &NationalAreas, budgets: &[CountryBudget]) -> Result<Vec<AdjustedRate>> {
    let mut groups: BTreeMap<(String, Nutrient, i32), Vec<&RateRecord>> = BTreeMap::new();
    for p in predictions {
        groups.entry((p.country.clone(), p.nutrient, p.year)).or_default().push(p);
    }
    let mut out = Vec::new();
    for b in budgets {
        let Some(members) = groups.get(&b.key()) else {
            return Err(Error::Missing(format!("predictions for {} {} {}", b.country, b.nutrient, b.year)));
        };
        let crop_areas = members
            .iter()
            .map(|p| {
                areas
                    .get(&(p.country.clone(), p.crop, p.year))
                    .copied()
                    .ok_or_else(|| Error::Missing(format!("harvested area for {} {} {}", p.country, p.crop.label(), p.year)))
            })
            .collect::<Result<Vec<_>>>()?;
        let raw: Vec<f64> = members.iter().map(|p| p.rate).collect();
        let adj = adjust_predictions(&raw, &crop_areas, b.net_budget)
            .map_err(|e| Error::invalid(format!("{} {} {}: {e}", b.country, b.nutrient, b.year)))?;
        for (p, r) in members.iter().zip(adj.rates) {
            out.push(AdjustedRate {
                country: p.country.clone(),
                crop: p.crop,
                year: p.year,
                nutrient: p.nutrient,
                rate_raw: p.rate,
                rate_adjusted: r,
                scale: adj.scale,
            });
        }
    }
    out.sort_by(|a, b| (&a.country, a.crop, a.year, a.nutrient).cmp(&(&b.country, b.crop, b.year, b.nutrient)));
    Ok(out)
}
