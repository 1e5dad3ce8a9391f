//! Exact path-dependent TreeSHAP, one-hot group aggregation and mean-|φ|
//! importance ranking.
//!
//! Attributions use node covers as the background distribution, so no
//! reference data set is needed: `base_value` is the cover-weighted mean
//! output and `base_value + Σφ` equals the prediction for the row.

mod export;
mod groups;
mod tree_shap;

pub use export::{write_beeswarm, write_ranking, write_shap_matrix};
pub use groups::{aggregate_groups, importance_ranking, FeatureGrouping, GroupedShap};
pub use tree_shap::{explain_rows, tree_expected_value, tree_shap, tree_shap_into, ShapVector};
