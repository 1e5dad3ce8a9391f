use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{complement, kfold};
use super::metrics::metrics;
use crate::error::{Error, Result};
use crate::gbdt::{fit, FeatureMatrix, GbdtConfig};

/// A tunable `GbdtConfig` field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    MaxDepth,
    NTrees,
    LearningRate,
    MinSamplesLeaf,
    MaxBins,
    Subsample,
    Colsample,
    MinChildWeight,
}

impl Param {
    fn apply(self, cfg: &mut GbdtConfig, v: f64) {
        match self {
            Param::MaxDepth => cfg.max_depth = v as usize,
            Param::NTrees => cfg.n_trees = v as usize,
            Param::LearningRate => cfg.learning_rate = v,
            Param::MinSamplesLeaf => cfg.min_samples_leaf = v as usize,
            Param::MaxBins => cfg.max_bins = v as usize,
            Param::Subsample => cfg.subsample = v,
            Param::Colsample => cfg.colsample = v,
            Param::MinChildWeight => cfg.min_child_weight = v,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Param::MaxDepth => "max_depth",
            Param::NTrees => "n_trees",
            Param::LearningRate => "learning_rate",
            Param::MinSamplesLeaf => "min_samples_leaf",
            Param::MaxBins => "max_bins",
            Param::Subsample => "subsample",
            Param::Colsample => "colsample",
            Param::MinChildWeight => "min_child_weight",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named hyperparameters with candidate values, expanded as a Cartesian
/// product over a base config. The first axis varies slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub axes: Vec<(Param, Vec<f64>)>,
}

impl SearchGrid {
    pub fn new(axes: Vec<(Param, Vec<f64>)>) -> Result<Self> {
        if axes.iter().any(|(_, vs)| vs.is_empty()) {
            return Err(Error::Config("search grid axis without candidates".into()));
        }
        Ok(SearchGrid { axes })
    }

    /// A grid with no axes: the base config alone.
    pub fn singleton() -> Self {
        SearchGrid { axes: Vec::new() }
    }

    /// HGB grid: depth × iterations × learning rate × leaf size.
    pub fn hgb_full() -> Self {
        SearchGrid {
            axes: vec![
                (Param::MaxDepth, vec![2.0, 5.0, 10.0, 20.0]),
                (Param::NTrees, vec![25.0, 50.0, 100.0, 200.0, 500.0]),
                (Param::LearningRate, vec![0.01, 0.1, 0.5, 1.0]),
                (Param::MinSamplesLeaf, vec![5.0, 10.0, 20.0, 50.0]),
            ],
        }
    }

    /// XGB-style grid over depth, trees, column and row sampling, child weight.
    pub fn xgb_full() -> Self {
        SearchGrid {
            axes: vec![
                (Param::MaxDepth, vec![2.0, 3.0, 4.0, 5.0]),
                (Param::NTrees, vec![25.0, 50.0, 100.0, 200.0, 300.0, 400.0]),
                (Param::Colsample, vec![0.6, 0.7, 0.8, 0.9, 1.0]),
                (Param::Subsample, vec![0.6, 0.7, 0.8, 0.9, 1.0]),
                (Param::MinChildWeight, vec![3.0, 4.0, 5.0, 6.0, 8.0, 10.0]),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn configs(&self, base: &GbdtConfig) -> Vec<GbdtConfig> {
        let mut out = vec![base.clone()];
        for (param, values) in &self.axes {
            out = out
                .iter()
                .flat_map(|cfg| {
                    values.iter().map(move |&v| {
                        let mut c = cfg.clone();
                        param.apply(&mut c, v);
                        c
                    })
                })
                .collect();
        }
        out
    }
}

/// Mean validation MSE of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScore {
    pub config: GbdtConfig,
    pub mean_mse: f64,
}

#[derive(Clone, Debug)]
pub struct GridResult {
    pub best: GbdtConfig,
    pub scores: Vec<GridScore>,
    /// Held-out rows of each inner fold, as indices into the searched data.
    pub folds: Vec<Vec<usize>>,
}

/// Exhaustive k-fold search; the lowest mean validation MSE wins, earliest
/// grid point on ties.
pub fn grid_search(
    matrix: &FeatureMatrix,
    targets: &[f64],
    grid: &SearchGrid,
    base: &GbdtConfig,
    k_inner: usize,
    fold_seed: u64,
) -> Result<GridResult> {
    if targets.len() != matrix.n_rows() {
        return Err(Error::invalid("target length differs from row count"));
    }
    let configs = grid.configs(base);
    for c in &configs {
        c.validate()?;
    }
    let folds = kfold(matrix.n_rows(), k_inner, fold_seed)?;
    let splits = folds
        .iter()
        .map(|test| {
            let train = complement(matrix.n_rows(), test);
            let y_train: Vec<f64> = train.iter().map(|&i| targets[i]).collect();
            let y_test: Vec<f64> = test.iter().map(|&i| targets[i]).collect();
            Ok((matrix.select_rows(&train)?, y_train, matrix.select_rows(test)?, y_test))
        })
        .collect::<Result<Vec<_>>>()?;

    let scores = configs
        .into_par_iter()
        .map(|config| {
            let mut total = 0.0;
            for (x_tr, y_tr, x_te, y_te) in &splits {
                let model = fit(x_tr, y_tr, &config)?;
                total += metrics(y_te, &model.predict_matrix(x_te)?)?.mse;
            }
            Ok(GridScore {
                config,
                mean_mse: total / splits.len() as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.mean_mse < scores[best].mean_mse {
            best = i;
        }
    }
    Ok(GridResult {
        best: scores[best].config.clone(),
        scores,
        folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_data(n: usize) -> (FeatureMatrix, Vec<f64>) {
        let rows: Vec<Vec<Option<f64>>> = (0..n).map(|i| vec![Some(i as f64)]).collect();
        let y = (0..n).map(|i| if i < n / 2 { 0.0 } else { 10.0 }).collect();
        (FeatureMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(SearchGrid::hgb_full().len(), 320);
        assert_eq!(SearchGrid::hgb_full().configs(&GbdtConfig::default()).len(), 320);
        assert_eq!(SearchGrid::xgb_full().len(), 3600);
        assert_eq!(SearchGrid::singleton().len(), 1);
    }

    #[test]
    fn first_axis_varies_slowest() {
        let g = SearchGrid::new(vec![
            (Param::MaxDepth, vec![1.0, 2.0]),
            (Param::LearningRate, vec![0.1, 0.2]),
        ])
        .unwrap();
        let got: Vec<(usize, f64)> = g
            .configs(&GbdtConfig::default())
            .iter()
            .map(|c| (c.max_depth, c.learning_rate))
            .collect();
        assert_eq!(got, vec![(1, 0.1), (1, 0.2), (2, 0.1), (2, 0.2)]);
    }

    #[test]
    fn empty_axis_rejected() {
        assert!(SearchGrid::new(vec![(Param::NTrees, vec![])]).is_err());
    }

    #[test]
    fn singleton_grid_returns_base() {
        let (x, y) = line_data(40);
        let base = GbdtConfig { n_trees: 3, min_samples_leaf: 2, ..Default::default() };
        let r = grid_search(&x, &y, &SearchGrid::singleton(), &base, 3, 0).unwrap();
        assert_eq!(r.best, base);
        assert_eq!(r.scores.len(), 1);
    }

    #[test]
    fn higher_learning_rate_wins_on_learnable_data() {
        let (x, y) = line_data(60);
        let base = GbdtConfig { n_trees: 2, min_samples_leaf: 2, ..Default::default() };
        let grid = SearchGrid::new(vec![(Param::LearningRate, vec![1e-6, 1.0])]).unwrap();
        let r = grid_search(&x, &y, &grid, &base, 3, 1).unwrap();
        // Oracle: train both configs on the same folds and compare directly.
        assert!(r.scores[1].mean_mse < r.scores[0].mean_mse);
        assert_eq!(r.best.learning_rate, 1.0);
    }

    #[test]
    fn too_few_rows_for_folds() {
        let (x, y) = line_data(3);
        assert!(grid_search(&x, &y, &SearchGrid::singleton(), &GbdtConfig::default(), 5, 0).is_err());
    }
}
