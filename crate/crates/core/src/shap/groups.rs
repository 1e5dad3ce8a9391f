use std::collections::HashMap;

use super::tree_shap::ShapVector;
use crate::error::{Error, Result};

/// Maps each encoded column to the name of the feature it came from.
/// One-hot families share a name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureGrouping {
    column_groups: Vec<String>,
}

impl FeatureGrouping {
    pub fn new(column_groups: Vec<String>) -> Self {
        FeatureGrouping { column_groups }
    }

    pub fn identity(names: &[String]) -> Self {
        FeatureGrouping::new(names.to_vec())
    }

    pub fn n_columns(&self) -> usize {
        self.column_groups.len()
    }

    pub fn column_group(&self, col: usize) -> Option<&str> {
        self.column_groups.get(col).map(String::as_str)
    }

    /// Distinct group names in order of first appearance.
    pub fn groups(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for g in &self.column_groups {
            if !seen.contains(g) {
                seen.push(g.clone());
            }
        }
        seen
    }
}

/// Attributions summed per group; ordered as `FeatureGrouping::groups`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedShap {
    pub groups: Vec<String>,
    pub values: Vec<f64>,
    pub base_value: f64,
}

pub fn aggregate_groups(shap: &ShapVector, grouping: &FeatureGrouping) -> Result<GroupedShap> {
    if grouping.n_columns() < shap.values.len() {
        return Err(Error::invalid(format!(
            "column {} has no group",
            grouping.n_columns()
        )));
    }
    if grouping.n_columns() > shap.values.len() {
        return Err(Error::Arity {
            expected: grouping.n_columns(),
            got: shap.values.len(),
        });
    }
    let groups = grouping.groups();
    let pos: HashMap<&str, usize> = groups.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
    let mut values = vec![0.0; groups.len()];
    for (c, phi) in shap.values.iter().enumerate() {
        values[pos[grouping.column_groups[c].as_str()]] += phi;
    }
    Ok(GroupedShap {
        groups,
        values,
        base_value: shap.base_value,
    })
}

/// `(group, mean |φ|)` sorted by descending importance; equal importances
/// keep column order.
pub fn importance_ranking(groups: &[String], rows: &[Vec<f64>]) -> Result<Vec<(String, f64)>> {
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    let mut sums = vec![0.0; groups.len()];
    for r in rows {
        if r.len() != groups.len() {
            return Err(Error::Arity { expected: groups.len(), got: r.len() });
        }
        for (s, v) in sums.iter_mut().zip(r) {
            *s += v.abs();
        }
    }
    let n = rows.len() as f64;
    let mut out: Vec<(String, f64)> = groups.iter().cloned().zip(sums.into_iter().map(|s| s / n)).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(out)
}
