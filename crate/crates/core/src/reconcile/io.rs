use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{AdjustedRate, CountryBudget};
use crate::domain::{CropClass, Nutrient};
use crate::error::{Error, Result};
use crate::features::RateRecord;

/// National harvested area per (country, crop, year), ha.
pub type NationalAreas = BTreeMap<(String, CropClass, i32), f64>;

/// National agricultural consumption before the grassland share, t.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct BudgetTotal {
    pub country: String,
    pub nutrient: Nutrient,
    pub year: i32,
    pub total_use: f64,
}

pub fn read_budget_totals<R: Read>(reader: R, origin: &Path) -> Result<Vec<BudgetTotal>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(|e| Error::parse(origin, e)))
        .collect()
}

/// `country,crop,year,area_ha`.
pub fn read_national_areas<R: Read>(reader: R, origin: &Path) -> Result<NationalAreas> {
    #[derive(Deserialize)]
    struct Row {
        country: String,
        crop: CropClass,
        year: i32,
        area_ha: f64,
    }
    let mut out = NationalAreas::new();
    for row in csv::Reader::from_reader(reader).deserialize::<Row>() {
        let r = row.map_err(|e| Error::parse(origin, e))?;
        if !(r.area_ha >= 0.0) {
            return Err(Error::parse(origin, format!("negative area for {} {} {}", r.country, r.crop.label(), r.year)));
        }
        out.insert((r.country, r.crop, r.year), r.area_ha);
    }
    Ok(out)
}

/// Long-format rates: `country,crop,year,nutrient,rate`.
pub fn write_rates<W: Write>(out: W, rates: &[RateRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["country", "crop", "year", "nutrient", "rate"])?;
    for r in rates {
        w.write_record([
            r.country.clone(),
            r.crop.file_name().to_string(),
            r.year.to_string(),
            r.nutrient.to_string(),
            format!("{:?}", r.rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rates<R: Read>(reader: R, origin: &Path) -> Result<Vec<RateRecord>> {
    #[derive(Deserialize)]
    struct Row {
        country: String,
        crop: CropClass,
        year: i32,
        nutrient: Nutrient,
        rate: f64,
    }
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize::<Row>() {
        let r = row.map_err(|e| Error::parse(origin, e))?;
        out.push(RateRecord { country: r.country, crop: r.crop, year: r.year, nutrient: r.nutrient, rate: r.rate });
    }
    Ok(out)
}

pub fn write_budgets<W: Write>(out: W, budgets: &[CountryBudget]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["country", "nutrient", "year", "total_use", "grass_share", "net_budget"])?;
    for b in budgets {
        w.write_record([
            b.country.clone(),
            b.nutrient.to_string(),
            b.year.to_string(),
            format!("{:?}", b.total_use),
            format!("{:?}", b.grass_share),
            format!("{:?}", b.net_budget),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_adjusted<W: Write>(out: W, rows: &[AdjustedRate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["country", "crop", "year", "nutrient", "rate_raw", "rate_adjusted", "scale"])?;
    for r in rows {
        w.write_record([
            r.country.clone(),
            r.crop.file_name().to_string(),
            r.year.to_string(),
            r.nutrient.to_string(),
            format!("{:?}", r.rate_raw),
            format!("{:?}", r.rate_adjusted),
            format!("{:?}", r.scale),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_adjusted<R: Read>(reader: R, origin: &Path) -> Result<Vec<AdjustedRate>> {
    #[derive(Deserialize)]
    struct Row {
        country: String,
        crop: CropClass,
        year: i32,
        nutrient: Nutrient,
        rate_raw: f64,
        rate_adjusted: f64,
        scale: f64,
    }
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize::<Row>() {
        let r = row.map_err(|e| Error::parse(origin, e))?;
        out.push(AdjustedRate {
            country: r.country,
            crop: r.crop,
            year: r.year,
            nutrient: r.nutrient,
            rate_raw: r.rate_raw,
            rate_adjusted: r.rate_adjusted,
            scale: r.scale,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjusted_round_trip() {
        let rows = vec![AdjustedRate {
            country: "X".into(),
            crop: CropClass::Rice,
            year: 2001,
            nutrient: Nutrient::K2O,
            rate_raw: 0.1,
            rate_adjusted: 1.0 / 3.0,
            scale: 10.0 / 3.0,
        }];
        let mut buf = Vec::new();
        write_adjusted(&mut buf, &rows).unwrap();
        assert_eq!(read_adjusted(buf.as_slice(), Path::new("a")).unwrap(), rows);
    }
}
