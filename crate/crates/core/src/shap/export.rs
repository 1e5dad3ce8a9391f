use std::io::Write;

use super::groups::GroupedShap;
use crate::error::Result;

/// One row per explained record, one column per group.
pub fn write_shap_matrix<W: Write>(out: W, rows: &[GroupedShap]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = rows.first() {
        let mut header = vec!["row".to_string(), "base_value".to_string()];
        header.extend(first.groups.iter().cloned());
        w.write_record(&header)?;
    }
    for (i, r) in rows.iter().enumerate() {
        let mut rec = vec![i.to_string(), format!("{:?}", r.base_value)];
        rec.extend(r.values.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Importance table with a category column, e.g. from a feature registry.
pub fn write_ranking<W: Write>(
    out: W,
    ranking: &[(String, f64)],
    category: impl Fn(&str) -> Option<String>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "feature", "category", "mean_abs_shap"])?;
    for (i, (g, v)) in ranking.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            g.clone(),
            category(g).unwrap_or_else(|| "NA".into()),
            format!("{v:?}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format `(row, feature, shap, feature_value)` tuples for beeswarm
/// plots; missing feature values are written as empty fields.
pub fn write_beeswarm<W: Write>(out: W, names: &[String], shap: &[Vec<f64>], values: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "feature", "shap", "value"])?;
    for (i, (s, x)) in shap.iter().zip(values).enumerate() {
        for ((name, phi), v) in names.iter().zip(s).zip(x) {
            let v = if v.is_nan() { String::new() } else { format!("{v:?}") };
            w.write_record([i.to_string(), name.clone(), format!("{phi:?}"), v])?;
        }
    }
    w.flush()?;
    Ok(())
}
