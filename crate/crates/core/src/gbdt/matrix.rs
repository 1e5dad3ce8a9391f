use crate::error::{Error, Result};

/// How a column was produced. One-hot family members are `Binary`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Binary,
}

/// Dense row-major predictor matrix. Missing cells are stored as NaN and
/// never as a numeric placeholder; infinite values are rejected on entry.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    kinds: Vec<ColumnKind>,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major values, NaN marking a missing cell.
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>, kinds: Vec<ColumnKind>) -> Result<Self> {
        if n_rows == 0 {
            return Err(Error::NoRows);
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::invalid(format!(
                "matrix has {} values, expected {n_rows}x{n_cols}",
                values.len()
            )));
        }
        if kinds.len() != n_cols {
            return Err(Error::invalid(format!("{} column kinds for {n_cols} columns", kinds.len())));
        }
        if let Some(pos) = values.iter().position(|v| v.is_infinite()) {
            return Err(Error::invalid(format!(
                "infinite value at row {}, column {}",
                pos / n_cols.max(1),
                pos % n_cols.max(1)
            )));
        }
        for (c, kind) in kinds.iter().enumerate() {
            if *kind == ColumnKind::Binary {
                for r in 0..n_rows {
                    let v = values[r * n_cols + c];
                    if !v.is_nan() && v != 0.0 && v != 1.0 {
                        return Err(Error::invalid(format!("binary column {c} holds {v} at row {r}")));
                    }
                }
            }
        }
        Ok(FeatureMatrix {
            n_rows,
            n_cols,
            values,
            kinds,
        })
    }

    /// All-numeric matrix from rows of optional values.
    pub fn from_rows(rows: &[Vec<Option<f64>>]) -> Result<Self> {
        let n_cols = rows.first().map(Vec::len).ok_or(Error::NoRows)?;
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::invalid(format!("row {r} has {} columns, expected {n_cols}", row.len())));
            }
            values.extend(row.iter().map(|v| v.unwrap_or(f64::NAN)));
        }
        FeatureMatrix::new(rows.len(), n_cols, values, vec![ColumnKind::Numeric; n_cols])
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let v = self.values[row * self.n_cols + col];
        (!v.is_nan()).then_some(v)
    }

    /// Raw row slice; NaN entries are missing.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n_cols.max(1)).take(self.n_rows)
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_rows).map(move |r| self.values[r * self.n_cols + col])
    }

    /// New matrix holding the given rows in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<FeatureMatrix> {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        FeatureMatrix::new(rows.len(), self.n_cols, values, self.kinds.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_infinite_and_empty() {
        assert!(matches!(
            FeatureMatrix::new(0, 2, vec![], vec![ColumnKind::Numeric; 2]),
            Err(Error::NoRows)
        ));
        assert!(FeatureMatrix::new(1, 1, vec![f64::INFINITY], vec![ColumnKind::Numeric]).is_err());
        assert!(FeatureMatrix::new(1, 1, vec![0.5], vec![ColumnKind::Binary]).is_err());
    }

    #[test]
    fn missing_cells_read_as_none() {
        let m = FeatureMatrix::from_rows(&[vec![Some(1.0), None], vec![None, Some(2.0)]]).unwrap();
        assert_eq!(m.get(0, 0), Some(1.0));
        assert_eq!(m.get(0, 1), None);
        let sub = m.select_rows(&[1]).unwrap();
        assert_eq!(sub.n_rows(), 1);
        assert_eq!(sub.get(0, 1), Some(2.0));
    }
}
