use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::ops::{harmonize_rate, oxide_conversion, Element};
use crate::domain::{CropClass, Nutrient};
use crate::error::{Error, Result};

/// Rates above this are treated as data-entry anomalies (kg/ha).
pub const ANOMALY_THRESHOLD: f64 = 5000.0;

/// One application rate label.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRecord {
    pub country: String,
    pub crop: CropClass,
    pub year: i32,
    pub nutrient: Nutrient,
    /// kg/ha over the whole harvested area of the crop.
    pub rate: f64,
}

/// `"1996"` or a season `"1996/97"`; seasons map to their starting year.
pub fn parse_season(s: &str) -> Result<i32> {
    let start = s.trim().split(['/', '-']).next().unwrap_or("");
    start
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad year or season {s:?}")))
}

#[derive(Debug, Deserialize)]
struct RawRate {
    country: String,
    crop: String,
    year: String,
    nutrient: String,
    #[serde(default)]
    rate: Option<f64>,
    #[serde(default)]
    fertilized_share: Option<f64>,
    #[serde(default)]
    rate_on_fertilized: Option<f64>,
    source_date: String,
    #[serde(default)]
    exclude: Option<String>,
}

/// Counters from one ingestion pass.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub read: usize,
    pub excluded: usize,
    pub superseded: usize,
}

fn is_truthy(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "1" | "true" | "yes" | "y")
}

/// Reads survey rate rows.
///
/// Required columns: `country, crop, year, nutrient, source_date`, plus
/// either `rate` or both `fertilized_share` and `rate_on_fertilized`.
/// Nutrient `P` or `K` marks elemental values, converted to oxides.
/// Rows flagged in `exclude` are dropped. Duplicate keys keep the row with
/// the latest `source_date` (ISO dates compare as text); on equal dates the
/// later row wins.
pub fn read_rate_records<R: Read>(reader: R, origin: &Path) -> Result<(Vec<RateRecord>, IngestStats)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut stats = IngestStats::default();
    let mut latest: BTreeMap<(String, CropClass, i32, Nutrient), (String, f64)> = BTreeMap::new();
    for (line, row) in rdr.deserialize::<RawRate>().enumerate() {
        let row = row.map_err(|e| Error::parse(origin, e))?;
        stats.read += 1;
        if row.exclude.as_deref().is_some_and(is_truthy) {
            stats.excluded += 1;
            continue;
        }
        let at = |e: Error| Error::parse(origin, format!("row {}: {e}", line + 1));
        let crop: CropClass = row.crop.parse().map_err(at)?;
        let year = parse_season(&row.year).map_err(at)?;
        let rate = match (row.rate, row.fertilized_share, row.rate_on_fertilized) {
            (Some(r), _, _) => r,
            (None, Some(s), Some(r)) => harmonize_rate(s, r).map_err(at)?,
            _ => return Err(at(Error::invalid("neither rate nor fertilized share and rate"))),
        };
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(at(Error::invalid(format!("rate {rate} must be finite and non-negative"))));
        }
        let (nutrient, rate) = match row.nutrient.trim() {
            "P" => (Nutrient::P2O5, oxide_conversion(Element::P, rate).map_err(at)?),
            "K" => (Nutrient::K2O, oxide_conversion(Element::K, rate).map_err(at)?),
            n => (n.parse().map_err(at)?, rate),
        };
        let key = (row.country.trim().to_string(), crop, year, nutrient);
        match latest.get(&key) {
            Some((date, _)) if *date > row.source_date => stats.superseded += 1,
            Some(_) => {
                stats.superseded += 1;
                latest.insert(key, (row.source_date, rate));
            }
            None => {
                latest.insert(key, (row.source_date, rate));
            }
        }
    }
    let records = latest
        .into_iter()
        .map(|((country, crop, year, nutrient), (_, rate))| RateRecord { country, crop, year, nutrient, rate })
        .collect();
    Ok((records, stats))
}

/// Drops rates above `ANOMALY_THRESHOLD`; returns the kept records and the
/// number removed.
pub fn filter_anomalies(records: Vec<RateRecord>) -> (Vec<RateRecord>, usize) {
    let before = records.len();
    let kept: Vec<RateRecord> = records.into_iter().filter(|r| r.rate <= ANOMALY_THRESHOLD).collect();
    let removed = before - kept.len();
    (kept, removed)
}

/// A country/crop/year with all three nutrient rates known.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledRow {
    pub country: String,
    pub crop: CropClass,
    pub year: i32,
    pub rates: [f64; 3],
}

impl LabeledRow {
    pub fn rate(&self, n: Nutrient) -> f64 {
        self.rates[n as usize]
    }

    pub fn key(&self) -> (String, CropClass, i32) {
        (self.country.clone(), self.crop, self.year)
    }
}

/// Keeps only keys where N, P2O5 and K2O are all present, sorted by key.
pub fn select_labeled(records: &[RateRecord]) -> Vec<LabeledRow> {
    let mut by_key: BTreeMap<(String, CropClass, i32), [Option<f64>; 3]> = BTreeMap::new();
    for r in records {
        by_key.entry((r.country.clone(), r.crop, r.year)).or_default()[r.nutrient as usize] = Some(r.rate);
    }
    by_key
        .into_iter()
        .filter_map(|((country, crop, year), v)| match v {
            [Some(n), Some(p), Some(k)] => Some(LabeledRow { country, crop, year, rates: [n, p, k] }),
            _ => None,
        })
        .collect()
}

/// Flattens labelled rows back to per-nutrient records.
pub fn labeled_to_records(rows: &[LabeledRow]) -> Vec<RateRecord> {
    rows.iter()
        .flat_map(|r| {
            Nutrient::ALL.iter().map(move |&n| RateRecord {
                country: r.country.clone(),
                crop: r.crop,
                year: r.year,
                nutrient: n,
                rate: r.rate(n),
            })
        })
        .collect()
}

pub fn write_labeled<W: std::io::Write>(out: W, rows: &[LabeledRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["country", "crop", "year", "N", "P2O5", "K2O"])?;
    for r in rows {
        w.write_record([
            r.country.clone(),
            r.crop.file_name().to_string(),
            r.year.to_string(),
            format!("{:?}", r.rates[0]),
            format!("{:?}", r.rates[1]),
            format!("{:?}", r.rates[2]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_labeled<R: Read>(reader: R, origin: &Path) -> Result<Vec<LabeledRow>> {
    #[derive(Deserialize)]
    struct Row {
        country: String,
        crop: String,
        year: i32,
        #[serde(rename = "N")]
        n: f64,
        #[serde(rename = "P2O5")]
        p: f64,
        #[serde(rename = "K2O")]
        k: f64,
    }
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let r = row.map_err(|e| Error::parse(origin, e))?;
        out.push(LabeledRow {
            country: r.country,
            crop: r.crop.parse().map_err(|e| Error::parse(origin, e))?,
            year: r.year,
            rates: [r.n, r.p, r.k],
        });
    }
    Ok(out)
}

/// Index of labelled rows by key.
pub fn label_index(rows: &[LabeledRow]) -> HashMap<(String, CropClass, i32), usize> {
    rows.iter().enumerate().map(|(i, r)| (r.key(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(country: &str, year: i32, n: Nutrient, rate: f64) -> RateRecord {
        RateRecord { country: country.into(), crop: CropClass::Wheat, year, nutrient: n, rate }
    }

    #[test]
    fn seasons_use_starting_year() {
        assert_eq!(parse_season("1996/97").unwrap(), 1996);
        assert_eq!(parse_season(" 2001 ").unwrap(), 2001);
        assert!(parse_season("n/a").is_err());
    }

    #[test]
    fn anomaly_boundary_is_inclusive() {
        let (kept, removed) = filter_anomalies(vec![
            rec("A", 1, Nutrient::N, 5000.0),
            rec("A", 2, Nutrient::N, 5001.0),
        ]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].rate, 5000.0);
        assert_eq!(removed, 1);
        assert_eq!(filter_anomalies(vec![]), (vec![], 0));
    }

    #[test]
    fn labeled_requires_all_three() {
        let recs = vec![
            rec("A", 1, Nutrient::N, 1.0),
            rec("A", 1, Nutrient::P2O5, 2.0),
            rec("A", 1, Nutrient::K2O, 3.0),
            rec("B", 1, Nutrient::N, 1.0),
            rec("B", 1, Nutrient::P2O5, 2.0),
        ];
        let l = select_labeled(&recs);
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].rates, [1.0, 2.0, 3.0]);
        assert!(select_labeled(&[]).is_empty());
    }

    #[test]
    fn ingestion_rules() {
        let text = "\
country,crop,year,nutrient,rate,fertilized_share,rate_on_fertilized,source_date,exclude
AAA,Wheat,1996/97,N,50,,,1998-01-01,
AAA,Wheat,1996,N,70,,,2002-05-01,
AAA,Wheat,1996,N,60,,,2000-01-01,
AAA,Maize,1990,N,,0.5,100,1991-01-01,
AAA,Maize,1990,P,10,,,1991-01-01,
AAA,Maize,1990,K2O,9,,,1991-01-01,silage
AAA,Maize,1990,K2O,8,,,1991-01-01,yes
";
        let (recs, stats) = read_rate_records(text.as_bytes(), Path::new("t.csv")).unwrap();
        assert_eq!(stats, IngestStats { read: 7, excluded: 1, superseded: 2 });
        let get = |crop: CropClass, n: Nutrient| recs.iter().find(|r| r.crop == crop && r.nutrient == n).unwrap().rate;
        assert_eq!(get(CropClass::Wheat, Nutrient::N), 70.0);
        assert_eq!(get(CropClass::Maize, Nutrient::N), 50.0);
        assert!((get(CropClass::Maize, Nutrient::P2O5) - 22.914).abs() < 1e-2);
        // "silage" is not a truthy flag, so that row stays
        assert_eq!(get(CropClass::Maize, Nutrient::K2O), 9.0);
    }

    #[test]
    fn ingestion_errors_name_the_file() {
        let text = "country,crop,year,nutrient,rate,source_date\nA,Tobacco leaves,1990,N,1,2000\n";
        let err = read_rate_records(text.as_bytes(), Path::new("rates.csv")).unwrap_err();
        assert!(err.to_string().contains("rates.csv"));
    }

    #[test]
    fn labeled_round_trip() {
        let rows = vec![LabeledRow { country: "X".into(), crop: CropClass::Rice, year: 2000, rates: [1.5, 2.0, 0.1] }];
        let mut buf = Vec::new();
        write_labeled(&mut buf, &rows).unwrap();
        assert_eq!(read_labeled(buf.as_slice(), Path::new("x")).unwrap(), rows);
    }

    proptest! {
        #[test]
        fn filters_are_idempotent(rates in prop::collection::vec((0usize..3, 0i32..4, 0.0..8000.0f64), 0..40)) {
            let recs: Vec<RateRecord> = rates.iter().map(|&(n, y, r)| rec("C", y, Nutrient::ALL[n], r)).collect();
            let (once, _) = filter_anomalies(recs);
            let (twice, removed) = filter_anomalies(once.clone());
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(removed, 0);
            let l1 = select_labeled(&once);
            let l2 = select_labeled(&labeled_to_records(&l1));
            prop_assert_eq!(l1, l2);
        }
    }
}
