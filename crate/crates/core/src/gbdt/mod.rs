//! Histogram gradient-boosted regression trees with native missing-value
//! routing.
//!
//! Features are quantile-binned once ([`build_bins`]); every tree is grown on
//! the residuals of the ensemble prefix by scanning per-node bin histograms.
//! A missing value is never imputed: each split stores which side missing
//! rows take.

mod bins;
mod fit;
mod matrix;
mod tree;

pub use bins::{build_bins, BinnedMatrix, ColumnBins, MAX_BINS};
pub use fit::{fit, GbdtConfig};
pub use matrix::{ColumnKind, FeatureMatrix};
pub use tree::{goes_left, Node, Tree, TreeEnsemble};
