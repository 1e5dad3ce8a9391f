use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::equations::{AreaSeries, ShareMethod, ShareObservation, SharePoint};
use super::rules::RuleOutput;
use crate::domain::Nutrient;
use crate::error::{Error, Result};

/// `country,year,a_f,a_a` rows grouped by country.
pub fn read_areas<R: Read>(reader: R, origin: &Path) -> Result<BTreeMap<String, AreaSeries>> {
    #[derive(Deserialize)]
    struct Row {
        country: String,
        year: i32,
        a_f: f64,
        a_a: f64,
    }
    let mut out: BTreeMap<String, AreaSeries> = BTreeMap::new();
    for row in csv::Reader::from_reader(reader).deserialize::<Row>() {
        let r = row.map_err(|e| Error::parse(origin, e))?;
        out.entry(r.country).or_default().insert(r.year, (r.a_f, r.a_a));
    }
    Ok(out)
}

/// `country,nutrient,year,q_f,q_a,a_f,a_a` rows.
pub fn read_observations<R: Read>(reader: R, origin: &Path) -> Result<Vec<ShareObservation>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(|e| Error::parse(origin, e)))
        .collect()
}

/// One line of the share table.
#[derive(Clone, Debug, PartialEq)]
pub struct ShareRow {
    pub country: String,
    pub nutrient: Nutrient,
    pub point: SharePoint,
    pub note: String,
}

pub fn share_rows(outputs: &[RuleOutput]) -> Vec<ShareRow> {
    outputs
        .iter()
        .flat_map(|o| {
            o.series.points.iter().zip(&o.notes).map(move |(p, n)| ShareRow {
                country: o.series.country.clone(),
                nutrient: o.series.nutrient,
                point: *p,
                note: n.clone(),
            })
        })
        .collect()
}

pub fn write_share_table<W: Write>(out: W, rows: &[ShareRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["country", "nutrient", "year", "share", "method", "clamped", "note"])?;
    for r in rows {
        w.write_record([
            r.country.clone(),
            r.nutrient.to_string(),
            r.point.year.to_string(),
            format!("{:?}", r.point.share),
            r.point.method.to_string(),
            r.point.clamped.to_string(),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_share_table<R: Read>(reader: R, origin: &Path) -> Result<Vec<ShareRow>> {
    #[derive(Deserialize)]
    struct Row {
        country: String,
        nutrient: Nutrient,
        year: i32,
        share: f64,
        method: String,
        clamped: bool,
        #[serde(default)]
        note: String,
    }
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize::<Row>() {
        let r = row.map_err(|e| Error::parse(origin, e))?;
        let method: ShareMethod = r.method.parse().map_err(|e| Error::parse(origin, e))?;
        out.push(ShareRow {
            country: r.country,
            nutrient: r.nutrient,
            point: SharePoint { year: r.year, share: r.share, method, clamped: r.clamped },
            note: r.note,
        });
    }
    Ok(out)
}
