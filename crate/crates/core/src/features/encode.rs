use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use super::registry::{FeatureRegistry, Kind};
use crate::domain::{CropClass, Nutrient};
use crate::error::{Error, Result};
use crate::gbdt::{ColumnKind, FeatureMatrix};
use crate::shap::FeatureGrouping;

/// A delimited table of raw cells; `None` is a missing (empty) field.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

impl RawTable {
    pub fn read<R: Read>(reader: R, origin: &Path) -> Result<RawTable> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::parse(origin, e))?;
            rows.push(rec.iter().map(|c| (!c.is_empty()).then(|| c.to_string())).collect());
        }
        Ok(RawTable { names, rows })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Result<Vec<Option<&str>>> {
        let c = self
            .column_index(name)
            .ok_or_else(|| Error::Missing(format!("column {name:?}")))?;
        Ok(self.rows.iter().map(|r| r.get(c).and_then(|v| v.as_deref())).collect())
    }
}

/// Levels of one categorical column, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneHotEncoder {
    pub name: String,
    pub levels: Vec<String>,
}

impl OneHotEncoder {
    pub fn fit<'a>(name: &str, values: impl IntoIterator<Item = Option<&'a str>>) -> Self {
        let levels: BTreeSet<String> = values.into_iter().flatten().map(str::to_string).collect();
        OneHotEncoder {
            name: name.to_string(),
            levels: levels.into_iter().collect(),
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        self.levels.iter().map(|l| format!("{}={l}", self.name)).collect()
    }

    /// A missing value makes the whole family missing; an unseen level
    /// encodes as all zeros.
    pub fn encode(&self, value: Option<&str>, out: &mut Vec<f64>) {
        match value {
            None => out.extend(std::iter::repeat(f64::NAN).take(self.levels.len())),
            Some(v) => out.extend(self.levels.iter().map(|l| if l == v { 1.0 } else { 0.0 })),
        }
    }
}

/// Encoded model inputs with their column names and SHAP grouping.
#[derive(Clone, Debug)]
pub struct Encoded {
    pub matrix: FeatureMatrix,
    pub column_names: Vec<String>,
    pub grouping: FeatureGrouping,
}

/// Expands `categorical` columns in place into one binary column per
/// level; other columns are parsed as numbers.
pub fn one_hot_encode(table: &RawTable, columns: &[&str], categorical: &[&str]) -> Result<Encoded> {
    if table.rows.is_empty() {
        return Err(Error::NoRows);
    }
    let mut encoders: HashMap<&str, OneHotEncoder> = HashMap::new();
    for &c in categorical {
        encoders.insert(c, OneHotEncoder::fit(c, table.column(c)?));
    }
    let mut names = Vec::new();
    let mut groups = Vec::new();
    let mut kinds = Vec::new();
    let mut sources = Vec::new();
    for &c in columns {
        let idx = table
            .column_index(c)
            .ok_or_else(|| Error::Missing(format!("column {c:?}")))?;
        sources.push(idx);
        if let Some(enc) = encoders.get(c) {
            for n in enc.column_names() {
                names.push(n);
                groups.push(c.to_string());
                kinds.push(ColumnKind::Binary);
            }
        } else {
            names.push(c.to_string());
            groups.push(c.to_string());
            kinds.push(ColumnKind::Numeric);
        }
    }
    let mut values = Vec::with_capacity(table.rows.len() * names.len());
    for (r, row) in table.rows.iter().enumerate() {
        for (&c, &idx) in columns.iter().zip(&sources) {
            let cell = row.get(idx).and_then(|v| v.as_deref());
            if let Some(enc) = encoders.get(c) {
                enc.encode(cell, &mut values);
            } else {
                values.push(match cell {
                    None => f64::NAN,
                    Some(s) => s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                        Error::invalid(format!("row {}: column {c:?} value {s:?} is not a finite number", r + 1))
                    })?,
                });
            }
        }
    }
    Ok(Encoded {
        matrix: FeatureMatrix::new(table.rows.len(), names.len(), values, kinds)?,
        column_names: names,
        grouping: FeatureGrouping::new(groups),
    })
}

/// Key of a feature-table row.
pub type RowKey = (String, CropClass, i32);

/// Model inputs for one nutrient: every feature-table row encoded, keyed
/// by country, crop and year.
#[derive(Clone, Debug)]
pub struct Design {
    pub keys: Vec<RowKey>,
    pub encoded: Encoded,
}

impl Design {
    /// Uses every registered feature present in `table` that applies to
    /// `nutrient`. Columns not in the registry are rejected.
    pub fn build(table: &RawTable, registry: &FeatureRegistry, nutrient: Nutrient) -> Result<Design> {
        for n in &table.names {
            if registry.get(n).is_none() {
                return Err(Error::invalid(format!("feature column {n:?} is not registered")));
            }
        }
        let countries = table.column("country")?;
        let crops = table.column("crop")?;
        let years = table.column("year")?;
        let mut keys = Vec::with_capacity(table.rows.len());
        for i in 0..table.rows.len() {
            let (Some(c), Some(k), Some(y)) = (countries[i], crops[i], years[i]) else {
                return Err(Error::invalid(format!("feature row {} lacks country, crop or year", i + 1)));
            };
            let year = y
                .parse()
                .map_err(|_| Error::invalid(format!("feature row {}: bad year {y:?}", i + 1)))?;
            keys.push((c.to_string(), k.parse()?, year));
        }
        let used: Vec<&str> = registry
            .specs()
            .iter()
            .filter(|s| s.applies_to(nutrient) && table.column_index(s.name).is_some())
            .map(|s| s.name)
            .collect();
        let categorical: Vec<&str> = used
            .iter()
            .copied()
            .filter(|n| registry.get(n).is_some_and(|s| s.kind == Kind::Categorical))
            .collect();
        Ok(Design {
            keys,
            encoded: one_hot_encode(table, &used, &categorical)?,
        })
    }

    /// Canonical feature-matrix file: keys then encoded columns, missing
    /// cells as empty fields.
    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["key_country".to_string(), "key_crop".into(), "key_year".into()];
        header.extend(self.encoded.column_names.iter().cloned());
        w.write_record(&header)?;
        for (i, (c, k, y)) in self.keys.iter().enumerate() {
            let mut rec = vec![c.clone(), k.file_name().to_string(), y.to_string()];
            rec.extend(self.encoded.matrix.row(i).iter().map(|v| {
                if v.is_nan() {
                    String::new()
                } else {
                    format!("{v:?}")
                }
            }));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(names: &[&str], rows: &[&[&str]]) -> RawTable {
        RawTable {
            names: names.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| r.iter().map(|c| (!c.is_empty()).then(|| c.to_string())).collect())
                .collect(),
        }
    }

    #[test]
    fn identity_block_for_two_levels() {
        let t = table(&["c"], &[&["b"], &["a"]]);
        let e = one_hot_encode(&t, &["c"], &["c"]).unwrap();
        assert_eq!(e.column_names, vec!["c=a", "c=b"]);
        assert_eq!(e.matrix.row(0), &[0.0, 1.0]);
        assert_eq!(e.matrix.row(1), &[1.0, 0.0]);
        assert_eq!(e.grouping.groups(), vec!["c"]);
    }

    #[test]
    fn thirteen_crop_columns() {
        let rows: Vec<Vec<&str>> = CropClass::ALL.iter().map(|c| vec![c.file_name()]).collect();
        let rows: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        let e = one_hot_encode(&table(&["crop"], &rows), &["crop"], &["crop"]).unwrap();
        assert_eq!(e.matrix.n_cols(), 13);
        for i in 0..13 {
            assert_eq!(e.matrix.row(i).iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn missing_category_blanks_the_family() {
        let t = table(&["x", "c"], &[&["1.5", "a"], &["", ""], &["2", "b"]]);
        let e = one_hot_encode(&t, &["x", "c"], &["c"]).unwrap();
        assert_eq!(e.column_names, vec!["x", "c=a", "c=b"]);
        assert!(e.matrix.row(1).iter().all(|v| v.is_nan()));
        assert_eq!(e.matrix.kinds()[1], ColumnKind::Binary);
    }

    #[test]
    fn unseen_level_is_all_zero() {
        let enc = OneHotEncoder::fit("c", [Some("a"), Some("b")]);
        let mut out = Vec::new();
        enc.encode(Some("z"), &mut out);
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn bad_number_is_reported() {
        let t = table(&["x"], &[&["abc"]]);
        assert!(one_hot_encode(&t, &["x"], &[]).is_err());
    }

    #[test]
    fn design_filters_by_nutrient() {
        let t = table(
            &["country", "crop", "year", "urea_price", "k_price", "map"],
            &[&["A", "Wheat", "1990", "200", "150", ""], &["B", "Rice", "1991", "", "140", "800"]],
        );
        let r = FeatureRegistry::standard();
        let d = Design::build(&t, &r, Nutrient::N).unwrap();
        assert!(d.encoded.column_names.contains(&"urea_price".to_string()));
        assert!(!d.encoded.column_names.contains(&"k_price".to_string()));
        assert_eq!(d.keys[1], ("B".to_string(), CropClass::Rice, 1991));
        let mut buf = Vec::new();
        d.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",,200.0"));
        let bad = table(&["country", "crop", "year", "mystery"], &[&["A", "Wheat", "1990", "1"]]);
        assert!(Design::build(&bad, &r, Nutrient::N).is_err());
    }
}
