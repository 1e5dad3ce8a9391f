use crate::error::{Error, Result};

/// Error metrics for one evaluation fold. `r2` is `None` when the
/// reference values have zero variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldMetrics {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub r2: Option<f64>,
}

pub fn metrics(y_true: &[f64], y_pred: &[f64]) -> Result<FoldMetrics> {
    if y_true.is_empty() {
        return Err(Error::NoRows);
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} targets",
            y_pred.len(),
            y_true.len()
        )));
    }
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let mut abs = 0.0;
    let mut sq = 0.0;
    let mut tot = 0.0;
    for (t, p) in y_true.iter().zip(y_pred) {
        let e = t - p;
        abs += e.abs();
        sq += e * e;
        tot += (t - mean) * (t - mean);
    }
    let mse = sq / n;
    Ok(FoldMetrics {
        mae: abs / n,
        mse,
        rmse: mse.sqrt(),
        r2: (tot > 0.0).then(|| 1.0 - sq / tot),
    })
}

/// Mean and sample standard deviation (n - 1 denominator; 0 for one value).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<MeanSd> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(MeanSd { mean, sd })
    }

    /// `"mean ± sd"` with `decimals` places; a rounded negative zero prints
    /// as zero.
    pub fn format(&self, decimals: usize) -> String {
        format!("{} ± {}", fmt_fixed(self.mean, decimals), fmt_fixed(self.sd, decimals))
    }
}

pub(crate) fn fmt_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Metrics aggregated across folds.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub mae: MeanSd,
    pub mse: MeanSd,
    pub rmse: MeanSd,
    /// Over folds where R² is defined; `None` if it never is.
    pub r2: Option<MeanSd>,
    pub folds: Vec<FoldMetrics>,
}

impl MetricReport {
    pub fn from_folds(folds: Vec<FoldMetrics>) -> Result<MetricReport> {
        let pick = |f: fn(&FoldMetrics) -> f64| folds.iter().map(f).collect::<Vec<_>>();
        let r2s: Vec<f64> = folds.iter().filter_map(|f| f.r2).collect();
        Ok(MetricReport {
            mae: MeanSd::of(&pick(|f| f.mae)).ok_or(Error::NoRows)?,
            mse: MeanSd::of(&pick(|f| f.mse)).ok_or(Error::NoRows)?,
            rmse: MeanSd::of(&pick(|f| f.rmse)).ok_or(Error::NoRows)?,
            r2: MeanSd::of(&r2s),
            folds,
        })
    }
}

/// Predicts the mean of its training targets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaiveBaseline {
    pub mean: f64,
}

impl NaiveBaseline {
    pub fn fit(train_targets: &[f64]) -> Result<Self> {
        if train_targets.is_empty() {
            return Err(Error::NoRows);
        }
        Ok(NaiveBaseline {
            mean: train_targets.iter().sum::<f64>() / train_targets.len() as f64,
        })
    }

    pub fn predict(&self) -> f64 {
        self.mean
    }
}
