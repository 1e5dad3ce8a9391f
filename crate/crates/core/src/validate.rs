//! Agreement between predicted rate series and reference series.
//!
//! MAPE divides by the reference value. Reference years equal to zero
//! still count towards MAE but are left out of MAPE and counted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::domain::{CropClass, Nutrient};
use crate::error::{Error, Result};
use crate::features::RateRecord;
use crate::select::fmt_fixed;

/// A yearly series, one value per year.
pub type Series = BTreeMap<i32, f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaeMape {
    pub mae: f64,
    /// `None` when every overlapping reference value is zero.
    pub mape: Option<f64>,
    pub n: usize,
    /// Overlapping years left out of MAPE because the reference was zero.
    pub zero_reference: usize,
}

pub fn mae_mape(pred: &Series, reference: &Series) -> Result<MaeMape> {
    let (mut abs_sum, mut pct_sum, mut n, mut n_pct) = (0.0, 0.0, 0usize, 0usize);
    for (y, r) in reference {
        let Some(p) = pred.get(y) else { continue };
        let d = (p - r).abs();
        abs_sum += d;
        n += 1;
        if *r != 0.0 {
            pct_sum += d / r.abs();
            n_pct += 1;
        }
    }
    if n == 0 {
        return Err(Error::invalid("prediction and reference share no year"));
    }
    if n_pct < n {
        log::warn!("{} reference years with value 0 left out of MAPE", n - n_pct);
    }
    Ok(MaeMape {
        mae: abs_sum / n as f64,
        mape: (n_pct > 0).then(|| 100.0 * pct_sum / n_pct as f64),
        n,
        zero_reference: n - n_pct,
    })
}

/// N + P2O5 + K2O per year; years missing any component are dropped.
pub fn npk_sum_series(n: &Series, p: &Series, k: &Series) -> Series {
    n.iter()
        .filter_map(|(y, a)| Some((*y, a + p.get(y)? + k.get(y)?)))
        .collect()
}

/// What a comparison measures: one nutrient or the NPK sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Nutrient(Nutrient),
    Npk,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Nutrient(Nutrient::N),
        Measure::Nutrient(Nutrient::P2O5),
        Measure::Nutrient(Nutrient::K2O),
        Measure::Npk,
    ];
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Nutrient(n) => f.write_str(n.as_str()),
            Measure::Npk => f.write_str("NPK"),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("NPK") {
            Ok(Measure::Npk)
        } else {
            s.parse().map(Measure::Nutrient)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub country: String,
    pub crop: CropClass,
    pub measure: Measure,
    pub n_years: usize,
    pub mae: f64,
    pub mape: Option<f64>,
}

/// One year of a compared series, for plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonPoint {
    pub country: String,
    pub crop: CropClass,
    pub measure: Measure,
    pub year: i32,
    pub pred: f64,
    pub reference: f64,
}

/// Reference rows: `country,crop,year,measure,value` with measure one of
/// N, P2O5, K2O or NPK.
pub fn read_reference<R: Read>(reader: R, origin: &Path) -> Result<BTreeMap<(String, CropClass, Measure), Series>> {
    #[derive(Deserialize)]
    struct Row {
        country: String,
        crop: CropClass,
        year: i32,
        measure: String,
        value: f64,
    }
    let mut out: BTreeMap<(String, CropClass, Measure), Series> = BTreeMap::new();
    for row in csv::Reader::from_reader(reader).deserialize::<Row>() {
        let r = row.map_err(|e| Error::parse(origin, e))?;
        let m: Measure = r.measure.parse().map_err(|e| Error::parse(origin, e))?;
        out.entry((r.country, r.crop, m)).or_default().insert(r.year, r.value);
    }
    Ok(out)
}

/// Compares predictions with every reference series that overlaps them.
/// Reference series without any overlapping prediction are skipped with a
/// warning.
pub fn compare(
    predictions: &[RateRecord],
    reference: &BTreeMap<(String, CropClass, Measure), Series>,
) -> Result<(Vec<ComparisonRow>, Vec<ComparisonPoint>)> {
    let mut pred: BTreeMap<(String, CropClass, Nutrient), Series> = BTreeMap::new();
    for p in predictions {
        pred.entry((p.country.clone(), p.crop, p.nutrient)).or_default().insert(p.year, p.rate);
    }
    let empty = Series::new();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for ((country, crop, measure), r) in reference {
        let get = |n: Nutrient| pred.get(&(country.clone(), *crop, n)).unwrap_or(&empty);
        let p = match measure {
            Measure::Nutrient(n) => get(*n).clone(),
            Measure::Npk => npk_sum_series(get(Nutrient::N), get(Nutrient::P2O5), get(Nutrient::K2O)),
        };
        let Ok(m) = mae_mape(&p, r) else {
            log::warn!("stage=validate key={country}/{crop}/{measure} metric=overlap value=0");
            continue;
        };
        rows.push(ComparisonRow { country: country.clone(), crop: *crop, measure: *measure, n_years: m.n, mae: m.mae, mape: m.mape });
        for (y, rv) in r {
            if let Some(pv) = p.get(y) {
                points.push(ComparisonPoint { country: country.clone(), crop: *crop, measure: *measure, year: *y, pred: *pv, reference: *rv });
            }
        }
    }
    Ok((rows, points))
}

/// One table line per (country, crop) with MAE and MAPE for N, P2O5, K2O
/// and NPK; absent cells are NA.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationLine {
    pub country: String,
    pub crop: CropClass,
    /// Largest sample size among the line's comparisons.
    pub n: usize,
    pub cells: [Option<(f64, Option<f64>)>; 4],
}

/// Groups rows into lines ordered by (country, crop). Two rows filling the
/// same cell are an error.
pub fn validation_lines(rows: &[ComparisonRow]) -> Result<Vec<ValidationLine>> {
    let mut lines: BTreeMap<(String, CropClass), ValidationLine> = BTreeMap::new();
    for r in rows {
        let line = lines.entry((r.country.clone(), r.crop)).or_insert_with(|| ValidationLine {
            country: r.country.clone(),
            crop: r.crop,
            n: 0,
            cells: [None; 4],
        });
        let slot = Measure::ALL.iter().position(|m| *m == r.measure).expect("every measure has a column");
        if line.cells[slot].is_some() {
            return Err(Error::invalid(format!(
                "duplicate validation key {} {} {}",
                r.country,
                r.crop.label(),
                r.measure
            )));
        }
        line.cells[slot] = Some((r.mae, r.mape));
        line.n = line.n.max(r.n_years);
    }
    Ok(lines.into_values().collect())
}

const HEADER: [&str; 10] = [
    "country", "crop", "N_MAE", "N_MAPE", "P2O5_MAE", "P2O5_MAPE", "K2O_MAE", "K2O_MAPE", "NPK_MAE", "NPK_MAPE",
];

fn cell_text(c: &Option<(f64, Option<f64>)>) -> [String; 2] {
    match c {
        Some((mae, mape)) => [fmt_fixed(*mae, 2), mape.map_or("NA".into(), |v| fmt_fixed(v, 2))],
        None => ["NA".into(), "NA".into()],
    }
}

fn line_fields(l: &ValidationLine) -> Vec<String> {
    let mut f = vec![l.country.clone(), format!("{} ({})", l.crop.label(), l.n)];
    for c in &l.cells {
        f.extend(cell_text(c));
    }
    f
}

/// Machine-readable validation table.
pub fn write_validation_csv<W: Write>(out: W, rows: &[ComparisonRow]) -> Result<()> {
    let lines = validation_lines(rows)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for l in &lines {
        w.write_record(line_fields(l))?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned plain-text rendering of the same table.
pub fn format_validation_table(rows: &[ComparisonRow]) -> Result<String> {
    let lines = validation_lines(rows)?;
    let mut table: Vec<Vec<String>> = vec![HEADER.iter().map(|s| s.to_string()).collect()];
    table.extend(lines.iter().map(line_fields));
    let widths: Vec<usize> = (0..HEADER.len()).map(|j| table.iter().map(|r| r[j].len()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for r in &table {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        s.push_str(cells.join("  ").trim_end());
        s.push('\n');
    }
    Ok(s)
}

pub fn write_comparison<W: Write>(out: W, points: &[ComparisonPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["country", "crop", "measure", "year", "pred", "ref"])?;
    for p in points {
        w.write_record([
            p.country.clone(),
            p.crop.file_name().to_string(),
            p.measure.to_string(),
            p.year.to_string(),
            format!("{:?}", p.pred),
            format!("{:?}", p.reference),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Keys present in `reference` that the predictions never cover.
pub fn uncovered(predictions: &[RateRecord], reference: &BTreeMap<(String, CropClass, Measure), Series>) -> Vec<(String, CropClass)> {
    let have: BTreeSet<(String, CropClass)> = predictions.iter().map(|p| (p.country.clone(), p.crop)).collect();
    reference
        .keys()
        .map(|(c, k, _)| (c.clone(), *k))
        .filter(|k| !have.contains(k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(v: &[(i32, f64)]) -> Series {
        v.iter().copied().collect()
    }

    #[test]
    fn identical_series() {
        let s = series(&[(2000, 5.0), (2001, 7.0)]);
        let m = mae_mape(&s, &s).unwrap();
        assert_eq!((m.mae, m.mape, m.n), (0.0, Some(0.0), 2));
    }

    #[test]
    fn hand_case() {
        let m = mae_mape(&series(&[(1, 10.0), (2, 30.0)]), &series(&[(1, 20.0), (2, 20.0)])).unwrap();
        assert_eq!(m.mae, 10.0);
        assert_eq!(m.mape, Some(50.0));
    }

    #[test]
    fn zero_reference_is_counted_not_divided() {
        let m = mae_mape(&series(&[(1, 10.0), (2, 3.0)]), &series(&[(1, 20.0), (2, 0.0)])).unwrap();
        assert_eq!(m.mae, 6.5);
        assert_eq!(m.mape, Some(50.0));
        assert_eq!(m.zero_reference, 1);
        assert!(mae_mape(&series(&[(1, 1.0)]), &series(&[(2, 1.0)])).is_err());
    }

    #[test]
    fn npk_drops_incomplete_years() {
        let s = npk_sum_series(&series(&[(1, 10.0), (2, 1.0)]), &series(&[(1, 5.0), (2, 1.0)]), &series(&[(1, 5.0)]));
        assert_eq!(s, series(&[(1, 20.0)]));
    }

    fn row(country: &str, crop: CropClass, measure: Measure) -> ComparisonRow {
        ComparisonRow { country: country.into(), crop, measure, n_years: 45, mae: 9.31, mape: Some(7.03) }
    }

    #[test]
    fn table_layout() {
        let mut buf = Vec::new();
        write_validation_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);

        let rows = [row("USA", CropClass::Maize, Measure::Nutrient(Nutrient::N))];
        let mut buf = Vec::new();
        write_validation_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "USA,Maize (45),9.31,7.03,NA,NA,NA,NA,NA,NA");
        assert!(format_validation_table(&rows).unwrap().contains("Maize (45)"));
    }

    #[test]
    fn duplicate_keys_fail() {
        let r = row("USA", CropClass::Maize, Measure::Npk);
        assert!(write_validation_csv(Vec::new(), &[r.clone(), r]).is_err());
    }

    #[test]
    fn lines_are_ordered() {
        let rows = [
            row("USA", CropClass::Wheat, Measure::Npk),
            row("IND", CropClass::Rice, Measure::Npk),
            row("USA", CropClass::Maize, Measure::Npk),
        ];
        let l = validation_lines(&rows).unwrap();
        let keys: Vec<_> = l.iter().map(|l| (l.country.as_str(), l.crop)).collect();
        assert_eq!(keys, vec![("IND", CropClass::Rice), ("USA", CropClass::Wheat), ("USA", CropClass::Maize)]);
    }

    #[test]
    fn compare_builds_npk() {
        let rec = |n, rate| RateRecord { country: "PAK".into(), crop: CropClass::Rice, year: 2000, nutrient: n, rate };
        let preds = [rec(Nutrient::N, 10.0), rec(Nutrient::P2O5, 5.0), rec(Nutrient::K2O, 5.0)];
        let reference = [(("PAK".to_string(), CropClass::Rice, Measure::Npk), series(&[(2000, 40.0)]))].into_iter().collect();
        let (rows, points) = compare(&preds, &reference).unwrap();
        assert_eq!(rows[0].mae, 20.0);
        assert_eq!(rows[0].mape, Some(50.0));
        assert_eq!(points[0].pred, 20.0);
    }

    proptest! {
        #[test]
        fn permutation_and_scaling(
            vals in prop::collection::vec((0.0f64..100.0, 0.1f64..100.0), 1..30),
            c in 0.1f64..10.0,
            shift in 0usize..30,
        ) {
            let p: Series = vals.iter().enumerate().map(|(i, v)| (i as i32, v.0)).collect();
            let r: Series = vals.iter().enumerate().map(|(i, v)| (i as i32, v.1)).collect();
            let base = mae_mape(&p, &r).unwrap();
            // Relabelling years with a common permutation changes nothing.
            let n = vals.len() as i32;
            let perm = |s: &Series| -> Series { s.iter().map(|(y, v)| ((y + shift as i32) % n, *v)).collect() };
            let q = mae_mape(&perm(&p), &perm(&r)).unwrap();
            prop_assert!((q.mae - base.mae).abs() <= 1e-9 * base.mae.max(1.0));
            let scale = |s: &Series| -> Series { s.iter().map(|(y, v)| (*y, v * c)).collect() };
            let sc = mae_mape(&scale(&p), &scale(&r)).unwrap();
            prop_assert!((sc.mae - c * base.mae).abs() <= 1e-9 * (c * base.mae).max(1.0));
            prop_assert!((sc.mape.unwrap() - base.mape.unwrap()).abs() <= 1e-9 * base.mape.unwrap().max(1.0));
        }

        #[test]
        fn npk_of_zeros_is_zero(years in prop::collection::btree_set(1900i32..2100, 0..20)) {
            let z: Series = years.iter().map(|y| (*y, 0.0)).collect();
            prop_assert!(npk_sum_series(&z, &z, &z).values().all(|v| *v == 0.0));
        }
    }
}
