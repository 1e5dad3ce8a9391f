//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use cropfert::gbdt::{Node, Tree, TreeEnsemble};
use rand::Rng;

/// Cover-weighted expectation of one tree when only the features in
/// `known` (a bit set) are observed: known features follow the row, unknown
/// ones average both children by cover.
fn conditional(tree: &Tree, node: usize, row: &[f64], known: u64) -> f64 {
    match tree.node(node) {
        Node::Leaf { value, .. } => *value,
        Node::Split { feature, threshold, missing_left, left, right, .. } => {
            if known & (1 << feature) != 0 {
                let x = row[*feature];
                let go_left = if x.is_nan() { *missing_left } else { x <= *threshold };
                conditional(tree, if go_left { *left } else { *right }, row, known)
            } else {
                let (cl, cr) = (tree.node(*left).cover(), tree.node(*right).cover());
                (cl * conditional(tree, *left, row, known) + cr * conditional(tree, *right, row, known)) / (cl + cr)
            }
        }
    }
}

/// Shapley values by enumerating every coalition, with weights built from
/// binomial coefficients.
pub fn brute_force_shap(ensemble: &TreeEnsemble, row: &[f64]) -> Vec<f64> {
    let m = ensemble.n_features();
    assert!(m <= 16, "enumeration is exponential");
    let value = |s: u64| -> f64 { ensemble.trees().iter().map(|t| conditional(t, 0, row, s)).sum() };
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let mut phi = vec![0.0; m];
    for (j, p) in phi.iter_mut().enumerate() {
        for s in 0u64..(1 << m) {
            if s & (1 << j) != 0 {
                continue;
            }
            let size = s.count_ones() as usize;
            let w = 1.0 / (m as f64 * binom(m - 1, size));
            *p += w * (value(s | (1 << j)) - value(s));
        }
    }
    phi
}

/// Random tree of depth at most `max_depth` whose covers add up.
pub fn random_tree<R: Rng>(rng: &mut R, n_features: usize, max_depth: usize) -> Tree {
    fn grow<R: Rng>(rng: &mut R, nodes: &mut Vec<Node>, nf: usize, depth: usize, cover: u32) {
        if depth == 0 || cover < 2 || rng.gen_bool(0.25) {
            nodes.push(Node::Leaf { value: rng.gen_range(-10.0..10.0), cover: f64::from(cover) });
            return;
        }
        let at = nodes.len();
        nodes.push(Node::Leaf { value: 0.0, cover: 0.0 });
        let lc = rng.gen_range(1..cover);
        let left = nodes.len();
        grow(rng, nodes, nf, depth - 1, lc);
        let right = nodes.len();
        grow(rng, nodes, nf, depth - 1, cover - lc);
        nodes[at] = Node::Split {
            feature: rng.gen_range(0..nf),
            threshold: rng.gen_range(-1.0..1.0),
            missing_left: rng.gen_bool(0.5),
            left,
            right,
            cover: f64::from(cover),
        };
    }
    let mut nodes = Vec::new();
    let cover = rng.gen_range(2..200);
    grow(rng, &mut nodes, n_features, max_depth, cover);
    Tree::new(nodes).expect("preorder layout")
}

pub fn random_ensemble<R: Rng>(rng: &mut R, n_features: usize, max_depth: usize, n_trees: usize) -> TreeEnsemble {
    let trees = (0..n_trees).map(|_| random_tree(rng, n_features, max_depth)).collect();
    TreeEnsemble::new(rng.gen_range(-5.0..5.0), n_features, trees).unwrap()
}

/// Row of values in [-1.5, 1.5] with each cell missing with probability `p`.
pub fn random_row<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<f64> {
    (0..n).map(|_| if rng.gen_bool(p) { f64::NAN } else { rng.gen_range(-1.5..1.5) }).collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
