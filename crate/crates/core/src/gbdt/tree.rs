use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A node of a binary regression tree. `cover` is the number of training
/// rows routed through the node.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        missing_left: bool,
        left: usize,
        right: usize,
        cover: f64,
    },
    Leaf {
        value: f64,
        cover: f64,
    },
}

impl Node {
    pub fn cover(&self) -> f64 {
        match self {
            Node::Split { cover, .. } | Node::Leaf { cover, .. } => *cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Nodes are laid out in preorder; `nodes[0]` is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

/// Routing rule shared by prediction and explanation: missing goes the
/// stored way, otherwise `value <= threshold` goes left.
#[inline]
pub fn goes_left(value: f64, threshold: f64, missing_left: bool) -> bool {
    if value.is_nan() {
        missing_left
    } else {
        value <= threshold
    }
}

impl Tree {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("tree without nodes"));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Split { left, right, .. } = n {
                if *left <= i || *right <= i || *left >= nodes.len() || *right >= nodes.len() {
                    return Err(Error::invalid(format!("node {i} has out-of-order children")));
                }
            }
        }
        Ok(Tree { nodes })
    }

    pub fn leaf(value: f64, cover: f64) -> Self {
        Tree {
            nodes: vec![Node::Leaf { value, cover }],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// Index of the leaf reached by `row`.
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    missing_left,
                    left,
                    right,
                    ..
                } => {
                    i = if goes_left(row[*feature], *threshold, *missing_left) {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!(),
        }
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { value, cover } => Some((*value, *cover)),
            Node::Split { .. } => None,
        })
    }

    /// Cover-weighted mean leaf value.
    pub fn expected_value(&self) -> f64 {
        let root = self.nodes[0].cover();
        if root <= 0.0 {
            return 0.0;
        }
        self.leaves().map(|(v, c)| v * c).sum::<f64>() / root
    }

    pub fn split_features(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        })
    }
}

/// Additive tree model: `base_score + sum of tree outputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeEnsemble {
    base_score: f64,
    n_features: usize,
    trees: Vec<Tree>,
}

const FORMAT_HEADER: &str = "cropfert-ensemble v1";

impl TreeEnsemble {
    pub fn new(base_score: f64, n_features: usize, trees: Vec<Tree>) -> Result<Self> {
        for (t, tree) in trees.iter().enumerate() {
            if let Some(f) = tree.split_features().find(|&f| f >= n_features) {
                return Err(Error::invalid(format!("tree {t} splits on feature {f} of {n_features}")));
            }
        }
        Ok(TreeEnsemble {
            base_score,
            n_features,
            trees,
        })
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn check_arity(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.n_features {
            return Err(Error::Arity {
                expected: self.n_features,
                got: row.len(),
            });
        }
        Ok(())
    }

    /// Prediction for one row; NaN marks a missing feature.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        self.check_arity(row)?;
        Ok(self.predict_unchecked(row))
    }

    pub(crate) fn predict_unchecked(&self, row: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }

    pub fn predict_matrix(&self, m: &super::FeatureMatrix) -> Result<Vec<f64>> {
        if m.n_cols() != self.n_features {
            return Err(Error::Arity {
                expected: self.n_features,
                got: m.n_cols(),
            });
        }
        Ok(m.rows().map(|r| self.predict_unchecked(r)).collect())
    }

    /// Portable text form: versioned header, then every tree as a preorder
    /// node list. Floats use the shortest round-trip representation.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{FORMAT_HEADER}").unwrap();
        writeln!(s, "n_features {}", self.n_features).unwrap();
        writeln!(s, "base_score {:?}", self.base_score).unwrap();
        writeln!(s, "n_trees {}", self.trees.len()).unwrap();
        for (t, tree) in self.trees.iter().enumerate() {
            writeln!(s, "tree {t} {}", tree.nodes.len()).unwrap();
            for node in &tree.nodes {
                match node {
                    Node::Split {
                        feature,
                        threshold,
                        missing_left,
                        left,
                        right,
                        cover,
                    } => writeln!(
                        s,
                        "split {feature} {threshold:?} {} {left} {right} {cover:?}",
                        u8::from(*missing_left)
                    ),
                    Node::Leaf { value, cover } => writeln!(s, "leaf {value:?} {cover:?}"),
                }
                .unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::invalid(format!("ensemble text line {}: {msg}", line + 1));
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::invalid(format!("ensemble text ends before {what}")));

        let (i, header) = next("header")?;
        if header.trim() != FORMAT_HEADER {
            return Err(bad(i, "unsupported header"));
        }
        fn field<T: std::str::FromStr>(line: &str, key: &str) -> Option<T> {
            let rest = line.strip_prefix(key)?.trim();
            rest.parse().ok()
        }
        let (i, l) = next("n_features")?;
        let n_features: usize = field(l, "n_features").ok_or_else(|| bad(i, "expected n_features"))?;
        let (i, l) = next("base_score")?;
        let base_score: f64 = field(l, "base_score").ok_or_else(|| bad(i, "expected base_score"))?;
        let (i, l) = next("n_trees")?;
        let n_trees: usize = field(l, "n_trees").ok_or_else(|| bad(i, "expected n_trees"))?;

        let mut trees = Vec::with_capacity(n_trees);
        for t in 0..n_trees {
            let (i, l) = next("tree header")?;
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "tree" || parts[1].parse::<usize>().ok() != Some(t) {
                return Err(bad(i, "expected tree header"));
            }
            let n_nodes: usize = parts[2].parse().map_err(|_| bad(i, "bad node count"))?;
            let mut nodes = Vec::with_capacity(n_nodes);
            for _ in 0..n_nodes {
                let (i, l) = next("node")?;
                let p: Vec<&str> = l.split_whitespace().collect();
                let node = match p.as_slice() {
                    ["split", f, th, ml, le, ri, cov] => Node::Split {
                        feature: f.parse().map_err(|_| bad(i, "bad feature"))?,
                        threshold: th.parse().map_err(|_| bad(i, "bad threshold"))?,
                        missing_left: match *ml {
                            "1" => true,
                            "0" => false,
                            _ => return Err(bad(i, "bad missing flag")),
                        },
                        left: le.parse().map_err(|_| bad(i, "bad left index"))?,
                        right: ri.parse().map_err(|_| bad(i, "bad right index"))?,
                        cover: cov.parse().map_err(|_| bad(i, "bad cover"))?,
                    },
                    ["leaf", v, cov] => Node::Leaf {
                        value: v.parse().map_err(|_| bad(i, "bad leaf value"))?,
                        cover: cov.parse().map_err(|_| bad(i, "bad cover"))?,
                    },
                    _ => return Err(bad(i, "expected split or leaf")),
                };
                nodes.push(node);
            }
            trees.push(Tree::new(nodes)?);
        }
        TreeEnsemble::new(base_score, n_features, trees)
    }
}
