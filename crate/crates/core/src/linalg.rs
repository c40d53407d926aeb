//! Minimal dense matrix support for the low-dimensional systems solved here.
//!
//! Problem dimensions in this crate are tiny (two for every shipped problem),
//! so a plain row-major matrix with partially pivoted elimination covers all
//! needs without pulling in a linear-algebra dependency.

use crate::error::{Result, SolverError};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    /// Builds a matrix from nested row slices.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let nrows = rows.len();
        assert!(nrows > 0);
        let ncols = rows[0].len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| (0..self.ncols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Matrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out.data[i * other.ncols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Sum of absolute values along row `i`.
    pub fn row_abs_sum(&self, i: usize) -> f64 {
        (0..self.ncols).map(|j| self.get(i, j).abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// A pivot below `1e-14` times the matrix scale reports a singular Jacobian.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.len(), n);

    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let threshold = 1e-14 * m.max_abs();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = m.get(col, col).abs();
        for r in (col + 1)..n {
            let v = m.get(r, col).abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= threshold {
            return Err(SolverError::SingularJacobian);
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            rhs.swap(col, pivot_row);
        }
        let inv = 1.0 / m.get(col, col);
        for r in (col + 1)..n {
            let f = m.get(r, col) * inv;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m.set(r, j, m.get(r, j) - f * m.get(col, j));
            }
            rhs[r] -= f * rhs[col];
        }
    }

    for i in (0..n).rev() {
        let tail: f64 = ((i + 1)..n).map(|j| m.get(i, j) * rhs[j]).sum();
        rhs[i] = (rhs[i] - tail) / m.get(i, i);
    }
    Ok(rhs)
}
