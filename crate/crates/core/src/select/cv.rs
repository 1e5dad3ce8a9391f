use super::folds::{complement, kfold};
use super::grid::{grid_search, SearchGrid};
use super::metrics::{metrics, FoldMetrics, MetricReport, NaiveBaseline};
use crate::error::{Error, Result};
use crate::gbdt::{fit, FeatureMatrix, GbdtConfig};

/// Row bookkeeping of one outer iteration, in indices of the full data set.
#[derive(Clone, Debug, PartialEq)]
pub struct OuterTrace {
    pub test_rows: Vec<usize>,
    pub train_rows: Vec<usize>,
    /// Held-out rows of every inner fold of this iteration's grid search.
    pub inner_folds: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct NestedCvResult {
    pub report: MetricReport,
    /// Mean-of-training-targets baseline scored on the same outer splits.
    pub naive: MetricReport,
    pub selected: Vec<GbdtConfig>,
    pub trace: Vec<OuterTrace>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CvPlan {
    pub k_outer: usize,
    pub k_inner: usize,
    pub seed: u64,
}

impl Default for CvPlan {
    fn default() -> Self {
        CvPlan { k_outer: 2, k_inner: 5, seed: 0 }
    }
}

/// Outer folds estimate a procedure whose hyperparameters are chosen on
/// the outer training rows alone.
pub fn nested_cv(
    matrix: &FeatureMatrix,
    targets: &[f64],
    grid: &SearchGrid,
    base: &GbdtConfig,
    plan: CvPlan,
) -> Result<NestedCvResult> {
    if targets.len() != matrix.n_rows() {
        return Err(Error::invalid("target length differs from row count"));
    }
    let n = matrix.n_rows();
    let outer = kfold(n, plan.k_outer, plan.seed)?;
    let mut folds: Vec<FoldMetrics> = Vec::with_capacity(outer.len());
    let mut naive_folds = Vec::with_capacity(outer.len());
    let mut selected = Vec::with_capacity(outer.len());
    let mut trace = Vec::with_capacity(outer.len());

    for (o, test_rows) in outer.into_iter().enumerate() {
        let train_rows = complement(n, &test_rows);
        let x_tr = matrix.select_rows(&train_rows)?;
        let y_tr: Vec<f64> = train_rows.iter().map(|&i| targets[i]).collect();
        let x_te = matrix.select_rows(&test_rows)?;
        let y_te: Vec<f64> = test_rows.iter().map(|&i| targets[i]).collect();

        let inner_seed = plan.seed.wrapping_add(1 + o as u64);
        let search = grid_search(&x_tr, &y_tr, grid, base, plan.k_inner, inner_seed)?;
        let model = fit(&x_tr, &y_tr, &search.best)?;
        folds.push(metrics(&y_te, &model.predict_matrix(&x_te)?)?);

        let naive = NaiveBaseline::fit(&y_tr)?;
        naive_folds.push(metrics(&y_te, &vec![naive.predict(); y_te.len()])?);

        let inner_folds = search
            .folds
            .iter()
            .map(|f| f.iter().map(|&i| train_rows[i]).collect())
            .collect();
        log::info!(
            "stage=train key=outer{o} metric=inner_mse value={}",
            search.scores.iter().map(|s| s.mean_mse).fold(f64::INFINITY, f64::min)
        );
        selected.push(search.best);
        trace.push(OuterTrace { test_rows, train_rows, inner_folds });
    }

    Ok(NestedCvResult {
        report: MetricReport::from_folds(folds)?,
        naive: MetricReport::from_folds(naive_folds)?,
        selected,
        trace,
    })
}

/// Most frequently selected config; the earliest wins ties.
pub fn majority_config(selected: &[GbdtConfig]) -> Option<GbdtConfig> {
    let mut best: Option<(usize, &GbdtConfig)> = None;
    for c in selected {
        let count = selected.iter().filter(|d| *d == c).count();
        if best.map_or(true, |(b, _)| count > b) {
            best = Some((count, c));
        }
    }
    best.map(|(_, c)| c.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::grid::Param;

    fn data(n: usize) -> (FeatureMatrix, Vec<f64>) {
        let rows: Vec<Vec<Option<f64>>> = (0..n).map(|i| vec![Some((i % 4) as f64)]).collect();
        let y = (0..n).map(|i| (i % 4) as f64 * 3.0).collect();
        (FeatureMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn perfect_fit_scores_r2_one() {
        let (x, y) = data(80);
        let base = GbdtConfig { n_trees: 1, learning_rate: 1.0, max_depth: 3, min_samples_leaf: 1, ..Default::default() };
        let r = nested_cv(&x, &y, &SearchGrid::singleton(), &base, CvPlan::default()).unwrap();
        assert_eq!(r.report.folds.len(), 2);
        assert!((r.report.r2.unwrap().mean - 1.0).abs() < 1e-9);
    }

    #[test]
    fn audit_keeps_outer_test_rows_out_of_inner_search() {
        let (x, y) = data(47);
        let base = GbdtConfig { n_trees: 2, min_samples_leaf: 2, ..Default::default() };
        let grid = SearchGrid::new(vec![(Param::MaxDepth, vec![1.0, 2.0])]).unwrap();
        let r = nested_cv(&x, &y, &grid, &base, CvPlan { k_outer: 3, k_inner: 4, seed: 5 }).unwrap();
        let mut covered = vec![0; 47];
        for t in &r.trace {
            for &i in &t.test_rows {
                covered[i] += 1;
                assert!(t.inner_folds.iter().all(|f| !f.contains(&i)));
            }
            let mut inner: Vec<usize> = t.inner_folds.iter().flatten().copied().collect();
            inner.sort_unstable();
            assert_eq!(inner, t.train_rows);
        }
        assert!(covered.iter().all(|&c| c == 1));
    }

    #[test]
    fn majority_breaks_ties_by_order() {
        let a = GbdtConfig { max_depth: 2, ..Default::default() };
        let b = GbdtConfig { max_depth: 3, ..Default::default() };
        assert_eq!(majority_config(&[a.clone(), b.clone()]), Some(a.clone()));
        assert_eq!(majority_config(&[a.clone(), b.clone(), b.clone()]), Some(b));
        assert_eq!(majority_config(&[]), None);
    }
}
