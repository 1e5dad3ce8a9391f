use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bins::{build_bins, BinnedMatrix, MAX_BINS};
use super::matrix::FeatureMatrix;
use super::tree::{Node, Tree, TreeEnsemble};
use crate::error::{Error, Result};

/// Hyperparameters of the boosted ensemble. `subsample` and `colsample`
/// default to 1 so histogram-style grids are expressible without them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtConfig {
    pub max_depth: usize,
    pub n_trees: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub max_bins: usize,
    pub subsample: f64,
    pub colsample: f64,
    /// Minimum rows per child; the hessian is 1 under squared error.
    pub min_child_weight: f64,
    pub seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        GbdtConfig {
            max_depth: 6,
            n_trees: 100,
            learning_rate: 0.1,
            min_samples_leaf: 20,
            max_bins: 255,
            subsample: 1.0,
            colsample: 1.0,
            min_child_weight: 0.0,
            seed: 0,
        }
    }
}

impl GbdtConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.max_depth == 0 || self.n_trees == 0 || self.min_samples_leaf == 0 {
            return fail("max_depth, n_trees and min_samples_leaf must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return fail(format!("learning_rate must be in (0, 1], got {}", self.learning_rate));
        }
        if self.max_bins < 2 || self.max_bins > MAX_BINS {
            return fail(format!("max_bins must be in [2, {MAX_BINS}], got {}", self.max_bins));
        }
        for (name, v) in [("subsample", self.subsample), ("colsample", self.colsample)] {
            if !(v > 0.0 && v <= 1.0) {
                return fail(format!("{name} must be in (0, 1], got {v}"));
            }
        }
        if !(self.min_child_weight >= 0.0) || !self.min_child_weight.is_finite() {
            return fail(format!("min_child_weight must be >= 0, got {}", self.min_child_weight));
        }
        Ok(())
    }

    fn min_child_rows(&self) -> usize {
        self.min_samples_leaf.max(self.min_child_weight.ceil() as usize).max(1)
    }
}

#[derive(Clone, Copy, Debug)]
struct SplitCandidate {
    gain: f64,
    feature: usize,
    bin: usize,
    missing_left: bool,
}

struct Grower<'a> {
    binned: &'a BinnedMatrix,
    residual: &'a [f64],
    cols: &'a [usize],
    max_depth: usize,
    min_rows: usize,
    learning_rate: f64,
    nodes: Vec<Node>,
    hist_sum: Vec<f64>,
    hist_cnt: Vec<u32>,
}

impl Grower<'_> {
    fn leaf(&mut self, sum: f64, n: usize) -> usize {
        self.nodes.push(Node::Leaf {
            value: self.learning_rate * sum / n as f64,
            cover: n as f64,
        });
        self.nodes.len() - 1
    }

    fn best_split(&mut self, rows: &[usize], sum: f64) -> Option<SplitCandidate> {
        let n = rows.len();
        let parent_score = sum * sum / n as f64;
        let mut best: Option<SplitCandidate> = None;
        for &f in self.cols {
            let col_bins = self.binned.column_bins(f);
            let nb = col_bins.n_bins();
            if nb == 0 {
                continue;
            }
            let miss = col_bins.missing_bin() as usize;
            let hs = &mut self.hist_sum[..=nb];
            let hc = &mut self.hist_cnt[..=nb];
            hs.fill(0.0);
            hc.fill(0);
            let col = self.binned.column(f);
            for &r in rows {
                let b = col[r] as usize;
                hs[b] += self.residual[r];
                hc[b] += 1;
            }
            let (miss_sum, miss_cnt) = (hs[miss], hc[miss] as usize);
            let mut cum_sum = 0.0;
            let mut cum_cnt = 0usize;
            for b in 0..nb {
                cum_sum += hs[b];
                cum_cnt += hc[b] as usize;
                // b == nb-1 separates "present" from "missing" only
                let last = b + 1 == nb;
                for missing_left in [true, false] {
                    if last && (missing_left || miss_cnt == 0) {
                        continue;
                    }
                    if !missing_left && miss_cnt == 0 {
                        continue;
                    }
                    let (ls, lc) = if missing_left {
                        (cum_sum + miss_sum, cum_cnt + miss_cnt)
                    } else {
                        (cum_sum, cum_cnt)
                    };
                    let rc = n - lc;
                    if lc < self.min_rows || rc < self.min_rows {
                        continue;
                    }
                    let rs = sum - ls;
                    let gain = ls * ls / lc as f64 + rs * rs / rc as f64 - parent_score;
                    if gain > 0.0 && best.map_or(true, |b| gain > b.gain) {
                        best = Some(SplitCandidate {
                            gain,
                            feature: f,
                            bin: b,
                            missing_left,
                        });
                    }
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let n = rows.len();
        let sum: f64 = rows.iter().map(|&r| self.residual[r]).sum();
        if depth >= self.max_depth || n < 2 * self.min_rows {
            return self.leaf(sum, n);
        }
        let Some(split) = self.best_split(&rows, sum) else {
            return self.leaf(sum, n);
        };
        let col_bins = self.binned.column_bins(split.feature);
        let miss = col_bins.missing_bin() as usize;
        let threshold = col_bins.edges().get(split.bin).copied().unwrap_or(f64::MAX);
        let col = self.binned.column(split.feature);
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| {
            let b = col[r] as usize;
            if b == miss {
                split.missing_left
            } else {
                b <= split.bin
            }
        });

        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0, cover: 0.0 });
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[idx] = Node::Split {
            feature: split.feature,
            threshold,
            missing_left: split.missing_left,
            left,
            right,
            cover: n as f64,
        };
        idx
    }
}

/// Fits a squared-error boosted ensemble with histogram split search.
///
/// Each split tries sending missing values left and right and keeps the
/// better direction; with no missing rows at the node the direction is
/// left. Gain ties resolve to the lower feature index, then the lower bin.
pub fn fit(matrix: &FeatureMatrix, targets: &[f64], config: &GbdtConfig) -> Result<TreeEnsemble> {
    config.validate()?;
    let n = matrix.n_rows();
    if targets.len() != n {
        return Err(Error::invalid(format!("{} targets for {n} rows", targets.len())));
    }
    if let Some(i) = targets.iter().position(|t| !t.is_finite()) {
        return Err(Error::invalid(format!("non-finite target at row {i}")));
    }
    let binned = build_bins(matrix, config.max_bins)?;
    let base_score = targets.iter().sum::<f64>() / n as f64;
    let mut pred = vec![base_score; n];
    let mut residual = vec![0.0; n];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let max_bins_seen = (0..binned.n_cols())
        .map(|c| binned.column_bins(c).n_bins() + 1)
        .max()
        .unwrap_or(1);

    let n_cols = matrix.n_cols();
    let row_take = ((config.subsample * n as f64).floor() as usize).clamp(1, n);
    let col_take = ((config.colsample * n_cols as f64).round() as usize).clamp(n_cols.min(1), n_cols);

    let mut trees = Vec::with_capacity(config.n_trees);
    for _ in 0..config.n_trees {
        for i in 0..n {
            residual[i] = targets[i] - pred[i];
        }
        let rows: Vec<usize> = if row_take < n {
            let mut r = sample(&mut rng, n, row_take).into_vec();
            r.sort_unstable();
            r
        } else {
            (0..n).collect()
        };
        let cols: Vec<usize> = if col_take < n_cols {
            let mut c = sample(&mut rng, n_cols, col_take).into_vec();
            c.sort_unstable();
            c
        } else {
            (0..n_cols).collect()
        };
        let mut grower = Grower {
            binned: &binned,
            residual: &residual,
            cols: &cols,
            max_depth: config.max_depth,
            min_rows: config.min_child_rows(),
            learning_rate: config.learning_rate,
            nodes: Vec::new(),
            hist_sum: vec![0.0; max_bins_seen],
            hist_cnt: vec![0; max_bins_seen],
        };
        grower.grow(rows, 0);
        let tree = Tree::new(grower.nodes)?;
        for (i, p) in pred.iter_mut().enumerate() {
            *p += tree.predict(matrix.row(i));
        }
        trees.push(tree);
    }
    TreeEnsemble::new(base_score, n_cols, trees)
}
