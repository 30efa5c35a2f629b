use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::RngStream;
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Symmetric matrix with unit diagonal and `rho` everywhere else.
    pub fn constant_correlation(n: usize, rho: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = if i == j { 1.0 } else { rho };
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self * selfᵀ`.
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..=i {
                let v: f64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b)
                    .sum();
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    /// Writes `L·u` into `out`, assuming `self` is lower triangular.
    pub fn lower_mul_into(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.row(i)[..=i.min(self.cols - 1)];
            *o = row.iter().zip(u).map(|(a, b)| a * b).sum();
        }
    }

    /// `diag(scale) · self · diag(scale)`.
    pub fn scale_symmetric(&self, scale: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] *= scale[i] * scale[j];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Pivots at or above `-PSD_TOLERANCE * trace` are treated as rounding noise.
const PSD_TOLERANCE: f64 = 1e-10;
/// Replacement value (relative to the trace) for clamped pivots.
const PIVOT_FLOOR: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = m`.
///
/// Small or slightly negative pivots (no lower than `-1e-10·trace(m)`) are
/// clamped to `1e-12·trace(m)` so that positive semidefinite inputs with
/// rounding noise still factor; anything more negative is an error naming
/// the failing pivot.
pub fn cholesky_factor(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let scale = 1.0 + m.max_abs();
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    let trace = m.trace();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if pivot < PIVOT_FLOOR * trace {
            if pivot < -PSD_TOLERANCE * trace || !pivot.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: pivot,
                });
            }
            pivot = PIVOT_FLOOR * trace;
        }
        let diag = pivot.sqrt();
        l[(j, j)] = diag;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = if diag > 0.0 { s / diag } else { 0.0 };
        }
    }
    Ok(l)
}

/// Draws `count` rows `z = L·u` with `u` i.i.d. standard normal.
pub fn sample_correlated_normals(
    factor: &DenseMatrix,
    count: usize,
    rng: &mut RngStream,
) -> Result<DenseMatrix> {
    if !factor.is_square() {
        return Err(Error::DimensionMismatch {
            expected: factor.rows(),
            found: factor.cols(),
        });
    }
    let dim = factor.rows();
    let mut out = DenseMatrix::zeros(count, dim);
    let mut u = vec![0.0; dim];
    for r in 0..count {
        u.iter_mut().for_each(|v| *v = rng.standard_normal());
        factor.lower_mul_into(&u, out.row_mut(r));
    }
    Ok(out)
}

/// Random correlation matrix from a Gaussian factor model:
/// `C = normalize(B·Bᵀ + D)` with `B` a `dim × num_factors` standard
/// normal loading matrix and `D` a positive diagonal.
pub fn random_correlation_matrix(
    dim: usize,
    num_factors: usize,
    rng: &mut RngStream,
) -> Result<DenseMatrix> {
    if dim == 0 {
        return Err(Error::Domain(
            "correlation matrix dimension must be positive".into(),
        ));
    }
    if num_factors == 0 || num_factors > dim {
        return Err(Error::Domain(format!(
            "num_factors must lie in [1, {dim}], got {num_factors}"
        )));
    }
    let mut loadings = DenseMatrix::zeros(dim, num_factors);
    for i in 0..dim {
        for j in 0..num_factors {
            loadings[(i, j)] = rng.standard_normal();
        }
    }
    let mut cov = loadings.gram();
    let k = num_factors as f64;
    for i in 0..dim {
        cov[(i, i)] += k * rng.uniform(0.5, 1.5);
    }
    let inv_sd: Vec<f64> = cov.diagonal().iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut corr = cov.scale_symmetric(&inv_sd);
    for i in 0..dim {
        corr[(i, i)] = 1.0;
    }
    Ok(corr)
}
