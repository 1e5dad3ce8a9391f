use super::matrix::{ColumnKind, FeatureMatrix};
use crate::error::{Error, Result};

/// Upper limit on numeric bins per column.
pub const MAX_BINS: usize = 256;

/// Bin edges for one column. A value `v` falls in bin `b` when
/// `edges[b-1] < v <= edges[b]`, so splitting after bin `b` is the same as
/// the threshold test `v <= edges[b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnBins {
    edges: Vec<f64>,
    has_values: bool,
}

impl ColumnBins {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Number of numeric bins (zero for an all-missing column).
    pub fn n_bins(&self) -> usize {
        if self.has_values {
            self.edges.len() + 1
        } else {
            0
        }
    }

    /// Reserved index for missing cells, one past the numeric bins.
    pub fn missing_bin(&self) -> u16 {
        self.n_bins() as u16
    }

    pub fn bin_of(&self, v: f64) -> u16 {
        if v.is_nan() || !self.has_values {
            return self.missing_bin();
        }
        self.edges.partition_point(|&e| e < v) as u16
    }
}

/// Quantized copy of a [`FeatureMatrix`], stored column-major.
#[derive(Clone, Debug)]
pub struct BinnedMatrix {
    n_rows: usize,
    columns: Vec<ColumnBins>,
    bins: Vec<Vec<u16>>,
}

impl BinnedMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column_bins(&self, col: usize) -> &ColumnBins {
        &self.columns[col]
    }

    pub fn column(&self, col: usize) -> &[u16] {
        &self.bins[col]
    }

    pub fn bin(&self, row: usize, col: usize) -> u16 {
        self.bins[col][row]
    }
}

/// Midpoint strictly between `lo` and `hi` that keeps `lo` on the left.
fn edge_between(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

fn numeric_edges(mut present: Vec<f64>, max_bins: usize) -> Vec<f64> {
    present.sort_by(f64::total_cmp);
    let mut distinct = present.clone();
    distinct.dedup();
    if distinct.len() <= max_bins {
        return distinct.windows(2).map(|w| edge_between(w[0], w[1])).collect();
    }
    let n = present.len();
    let mut edges: Vec<f64> = Vec::with_capacity(max_bins - 1);
    for i in 1..max_bins {
        let pos = i * n / max_bins;
        let lo = present[pos - 1];
        // first value above `lo` at or after the cut
        let hi_idx = pos + present[pos..].partition_point(|&v| v <= lo);
        if hi_idx >= n {
            break;
        }
        let edge = edge_between(lo, present[hi_idx]);
        if edges.last().map_or(true, |&last| edge > last) {
            edges.push(edge);
        }
    }
    edges
}

/// Quantile-bins every column. Numeric columns get at most `max_bins` bins,
/// binary columns exactly two, and every column one extra missing bin.
pub fn build_bins(matrix: &FeatureMatrix, max_bins: usize) -> Result<BinnedMatrix> {
    if matrix.n_rows() == 0 {
        return Err(Error::NoRows);
    }
    if max_bins < 2 || max_bins > MAX_BINS {
        return Err(Error::invalid(format!("max_bins must be in [2, {MAX_BINS}], got {max_bins}")));
    }
    let mut columns = Vec::with_capacity(matrix.n_cols());
    let mut bins = Vec::with_capacity(matrix.n_cols());
    for (c, kind) in matrix.kinds().iter().enumerate() {
        let present: Vec<f64> = matrix.column(c).filter(|v| !v.is_nan()).collect();
        let col = match kind {
            ColumnKind::Binary => ColumnBins {
                edges: vec![0.5],
                has_values: true,
            },
            ColumnKind::Numeric => ColumnBins {
                has_values: !present.is_empty(),
                edges: numeric_edges(present, max_bins),
            },
        };
        bins.push(matrix.column(c).map(|v| col.bin_of(v)).collect());
        columns.push(col);
    }
    Ok(BinnedMatrix {
        n_rows: matrix.n_rows(),
        columns,
        bins,
    })
}
