use std::io::Write;

use super::metrics::{MeanSd, MetricReport};
use crate::error::Result;

/// One line of the performance table.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub fertilizer: String,
    pub model: String,
    pub report: MetricReport,
}

fn cell(v: Option<&MeanSd>, decimals: usize) -> String {
    v.map_or_else(|| "NA".to_string(), |m| m.format(decimals))
}

/// Writes `fertilizer,model,MAE,RMSE,MSE,R2` with `mean ± sd` cells; MSE
/// is printed without decimals.
pub fn write_metrics_table<W: Write>(out: W, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["fertilizer", "model", "MAE", "RMSE", "MSE", "R2"])?;
    for r in rows {
        w.write_record([
            r.fertilizer.clone(),
            r.model.clone(),
            cell(Some(&r.report.mae), 2),
            cell(Some(&r.report.rmse), 2),
            cell(Some(&r.report.mse), 0),
            cell(r.report.r2.as_ref(), 2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::metrics::metrics;

    #[test]
    fn renders_rows() {
        let folds = vec![metrics(&[0.0, 2.0], &[1.0, 1.0]).unwrap(); 2];
        let rows = vec![TableRow {
            fertilizer: "N".into(),
            model: "naive".into(),
            report: MetricReport::from_folds(folds).unwrap(),
        }];
        let mut buf = Vec::new();
        write_metrics_table(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "fertilizer,model,MAE,RMSE,MSE,R2\nN,naive,1.00 ± 0.00,1.00 ± 0.00,1 ± 0,0.00 ± 0.00\n"
        );
    }
}
