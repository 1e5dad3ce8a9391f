use rayon::prelude::*;

use crate::error::Result;
use crate::gbdt::{goes_left, FeatureMatrix, Node, Tree, TreeEnsemble};

/// Attributions for one row. `base_value + values.sum()` equals the
/// ensemble prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapVector {
    pub values: Vec<f64>,
    pub base_value: f64,
}

impl ShapVector {
    pub fn prediction(&self) -> f64 {
        self.base_value + self.values.iter().sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug)]
struct PathElem {
    feature: usize,
    zero: f64,
    one: f64,
    weight: f64,
}

const NO_FEATURE: usize = usize::MAX;

fn extend(path: &mut Vec<PathElem>, zero: f64, one: f64, feature: usize) {
    let l = path.len();
    path.push(PathElem {
        feature,
        zero,
        one,
        weight: if l == 0 { 1.0 } else { 0.0 },
    });
    let denom = (l + 1) as f64;
    for i in (0..l).rev() {
        path[i + 1].weight += one * path[i].weight * (i + 1) as f64 / denom;
        path[i].weight = zero * path[i].weight * (l - i) as f64 / denom;
    }
}

fn unwind(path: &mut Vec<PathElem>, idx: usize) {
    let l = path.len() - 1;
    let PathElem { zero, one, .. } = path[idx];
    let mut next = path[l].weight;
    let denom = (l + 1) as f64;
    for j in (0..l).rev() {
        if one != 0.0 {
            let t = path[j].weight;
            path[j].weight = next * denom / ((j + 1) as f64 * one);
            next = t - path[j].weight * zero * (l - j) as f64 / denom;
        } else {
            path[j].weight = path[j].weight * denom / (zero * (l - j) as f64);
        }
    }
    for j in idx..l {
        path[j].feature = path[j + 1].feature;
        path[j].zero = path[j + 1].zero;
        path[j].one = path[j + 1].one;
    }
    path.pop();
}

/// Total permutation weight of `path` with element `idx` removed.
fn unwound_sum(path: &[PathElem], idx: usize) -> f64 {
    let l = path.len() - 1;
    let PathElem { zero, one, .. } = path[idx];
    let mut total = 0.0;
    if one != 0.0 {
        let mut next = path[l].weight;
        for j in (0..l).rev() {
            let t = next / ((j + 1) as f64 * one);
            total += t;
            next = path[j].weight - t * zero * (l - j) as f64;
        }
    } else {
        for j in (0..l).rev() {
            total += path[j].weight / (zero * (l - j) as f64);
        }
    }
    total * (l + 1) as f64
}

struct Explainer<'a> {
    tree: &'a Tree,
    row: &'a [f64],
    phi: &'a mut [f64],
}

impl Explainer<'_> {
    fn recurse(&mut self, node: usize, mut path: Vec<PathElem>, zero: f64, one: f64, feature: usize) {
        extend(&mut path, zero, one, feature);
        match *self.tree.node(node) {
            Node::Leaf { value, .. } => {
                for i in 1..path.len() {
                    let w = unwound_sum(&path, i);
                    let e = path[i];
                    self.phi[e.feature] += w * (e.one - e.zero) * value;
                }
            }
            Node::Split {
                feature: f,
                threshold,
                missing_left,
                left,
                right,
                cover,
            } => {
                let (hot, cold) = if goes_left(self.row[f], threshold, missing_left) {
                    (left, right)
                } else {
                    (right, left)
                };
                let (mut iz, mut io) = (1.0, 1.0);
                if let Some(k) = (1..path.len()).find(|&k| path[k].feature == f) {
                    iz = path[k].zero;
                    io = path[k].one;
                    unwind(&mut path, k);
                }
                let hot_frac = self.tree.node(hot).cover() / cover;
                let cold_frac = self.tree.node(cold).cover() / cover;
                if iz * hot_frac != 0.0 || io != 0.0 {
                    self.recurse(hot, path.clone(), iz * hot_frac, io, f);
                }
                // A cold branch with no cover contributes nothing.
                if iz * cold_frac != 0.0 {
                    self.recurse(cold, path, iz * cold_frac, 0.0, f);
                }
            }
        }
    }
}

/// Value of the tree when no feature is known: leaves weighted by the
/// product of cover fractions along their path.
pub fn tree_expected_value(tree: &Tree) -> f64 {
    fn walk(t: &Tree, i: usize) -> f64 {
        match *t.node(i) {
            Node::Leaf { value, .. } => value,
            Node::Split { left, right, cover, .. } => {
                let l = t.node(left).cover() / cover;
                let r = t.node(right).cover() / cover;
                l * walk(t, left) + r * walk(t, right)
            }
        }
    }
    walk(tree, 0)
}

/// Adds the attributions of one tree for `row` into `phi`.
pub fn tree_shap_into(tree: &Tree, row: &[f64], phi: &mut [f64]) {
    if tree.node(0).is_leaf() {
        return;
    }
    let mut ex = Explainer { tree, row, phi };
    ex.recurse(0, Vec::with_capacity(tree.depth() + 2), 1.0, 1.0, NO_FEATURE);
}

/// Path-dependent TreeSHAP over an ensemble, with node covers as the
/// background distribution.
pub fn tree_shap(ensemble: &TreeEnsemble, row: &[f64]) -> Result<ShapVector> {
    ensemble.check_arity(row)?;
    let mut values = vec![0.0; ensemble.n_features()];
    let mut base_value = ensemble.base_score();
    for tree in ensemble.trees() {
        tree_shap_into(tree, row, &mut values);
        base_value += tree_expected_value(tree);
    }
    Ok(ShapVector { values, base_value })
}

/// Explains every row of `matrix`, in row order.
pub fn explain_rows(ensemble: &TreeEnsemble, matrix: &FeatureMatrix) -> Result<Vec<ShapVector>> {
    (0..matrix.n_rows())
        .into_par_iter()
        .map(|i| tree_shap(ensemble, matrix.row(i)))
        .collect()
}
