use crate::error::Result;
use crate::geo::Raster;

/// Half-widths of the square windows searched for new-land ratios.
pub const RINGS: [usize; 8] = [5, 10, 25, 50, 100, 150, 200, 250];

fn ratio_at(base: &Raster, combined: &Raster, idx: usize) -> Option<f64> {
    let d = combined.values[idx];
    if !(d > 0.0) {
        return None;
    }
    let h = base.values[idx];
    Some(if h.is_nan() { 0.0 } else { h / d })
}

fn window(n_rows: usize, n_cols: usize, row: usize, col: usize, k: usize) -> (usize, usize, usize, usize) {
    (
        row.saturating_sub(k),
        (row + k).min(n_rows - 1),
        col.saturating_sub(k),
        (col + k).min(n_cols - 1),
    )
}

/// Mean base-year crop ratio `HArea_M2000 / CArea_2000` around `cell`.
///
/// Each ring `k` is a `(2k+1)²` window clipped to the grid; only cells with
/// positive cropland enter the mean. The first ring with a nonzero mean
/// wins; if none has one the ratio is 1.
pub fn neighbor_ratio(base: &Raster, combined_2000: &Raster, cell: usize, rings: &[usize]) -> Result<f64> {
    base.same_grid(combined_2000)?;
    let s = &base.spec;
    let (row, col) = s.row_col(cell);
    for &k in rings {
        let (r0, r1, c0, c1) = window(s.n_rows, s.n_cols, row, col, k);
        let (mut sum, mut n) = (0.0, 0usize);
        for r in r0..=r1 {
            for c in c0..=c1 {
                if let Some(v) = ratio_at(base, combined_2000, s.index(r, c)) {
                    sum += v;
                    n += 1;
                }
            }
        }
        if n > 0 && sum > 0.0 {
            return Ok(sum / n as f64);
        }
    }
    Ok(1.0)
}

/// Summed-area tables answering [`neighbor_ratio`] in constant time per
/// ring. Whether a window is nonzero is decided on an integer count of
/// positive ratios, so prefix-sum rounding can never turn an empty ring
/// into a selected one.
pub struct NeighborIndex {
    n_rows: usize,
    n_cols: usize,
    sum: Vec<f64>,
    valid: Vec<u32>,
    positive: Vec<u32>,
}

impl NeighborIndex {
    pub fn new(base: &Raster, combined_2000: &Raster) -> Result<Self> {
        base.same_grid(combined_2000)?;
        let (nr, nc) = (base.spec.n_rows, base.spec.n_cols);
        let w = nc + 1;
        let mut sum = vec![0.0; (nr + 1) * w];
        let mut valid = vec![0u32; (nr + 1) * w];
        let mut positive = vec![0u32; (nr + 1) * w];
        for r in 0..nr {
            let (mut rs, mut rv, mut rp) = (0.0, 0u32, 0u32);
            for c in 0..nc {
                if let Some(v) = ratio_at(base, combined_2000, base.spec.index(r, c)) {
                    rs += v;
                    rv += 1;
                    rp += u32::from(v > 0.0);
                }
                let (above, here) = (r * w + c + 1, (r + 1) * w + c + 1);
                sum[here] = sum[above] + rs;
                valid[here] = valid[above] + rv;
                positive[here] = positive[above] + rp;
            }
        }
        Ok(NeighborIndex { n_rows: nr, n_cols: nc, sum, valid, positive })
    }

    fn rect<T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>>(&self, t: &[T], r0: usize, r1: usize, c0: usize, c1: usize) -> T {
        let w = self.n_cols + 1;
        t[(r1 + 1) * w + c1 + 1] + t[r0 * w + c0] - t[r0 * w + c1 + 1] - t[(r1 + 1) * w + c0]
    }

    pub fn ratio(&self, cell: usize, rings: &[usize]) -> f64 {
        let (row, col) = (cell / self.n_cols, cell % self.n_cols);
        for &k in rings {
            let (r0, r1, c0, c1) = window(self.n_rows, self.n_cols, row, col, k);
            if self.rect(&self.positive, r0, r1, c0, c1) > 0 {
                let n = self.rect(&self.valid, r0, r1, c0, c1);
                return self.rect(&self.sum, r0, r1, c0, c1) / f64::from(n);
            }
        }
        1.0
    }
}
