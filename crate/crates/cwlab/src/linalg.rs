//! Dense linear algebra for the small symmetric matrices this crate works
//! with (group counts are at most 16). LU with partial pivoting backs the
//! inverse and determinant; Cholesky with a relative pivot tolerance backs
//! positive-definiteness tests, solves and log-determinants.

use crate::error::{CwError, Result};

/// Relative pivot tolerance: a pivot counts as positive only if it exceeds
/// this multiple of the largest entry magnitude of the input matrix.
pub const PIVOT_REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zero(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(CwError::InvalidInput("matrix must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(CwError::InvalidInput(format!(
                    "matrix row has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(CwError::InvalidInput("matrix entries must be finite".into()));
                }
                data.push(v);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Self { dim, data: vec![value; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// (M + M^T) / 2 and whether any entry actually moved.
    pub fn symmetrized(&self) -> (Self, bool) {
        let mut out = self.clone();
        let mut changed = false;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                if v != self.get(i, j) {
                    changed = true;
                }
                out.set(i, j, v);
            }
        }
        (out, changed)
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// x^T M x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut q = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for (j, &xj) in x.iter().enumerate() {
                row += self.get(i, j) * xj;
            }
            q += x[i] * row;
        }
        q
    }

    pub fn mat_mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..self.dim {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for i in 0..self.dim * self.dim {
            out.data[i] -= other.data[i];
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
    }
}

/// Cholesky factor of a symmetric positive definite matrix (lower triangle,
/// M = L L^T). Only the lower triangle of the input is read.
#[derive(Clone, Debug)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

/// Err(k) carries the 1-based index of the first leading minor whose pivot
/// fell below the relative tolerance.
pub fn cholesky(m: &SquareMatrix) -> std::result::Result<Cholesky, usize> {
    let dim = m.dim();
    let tol = PIVOT_REL_TOL * m.max_abs();
    let mut l = vec![0.0f64; dim * dim];
    for j in 0..dim {
        let mut diag = m.get(j, j);
        for k in 0..j {
            diag -= l[j * dim + k] * l[j * dim + k];
        }
        if !(diag > tol) {
            return Err(j + 1);
        }
        let root = diag.sqrt();
        l[j * dim + j] = root;
        for i in (j + 1)..dim {
            let mut v = m.get(i, j);
            for k in 0..j {
                v -= l[i * dim + k] * l[j * dim + k];
            }
            l[i * dim + j] = v / root;
        }
    }
    Ok(Cholesky { dim, lower: l })
}

impl Cholesky {
    /// Solve M x = b by forward and back substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim);
        let d = self.dim;
        let mut y = b.to_vec();
        for i in 0..d {
            for k in 0..i {
                y[i] -= self.lower[i * d + k] * y[k];
            }
            y[i] /= self.lower[i * d + i];
        }
        for i in (0..d).rev() {
            for k in (i + 1)..d {
                y[i] -= self.lower[k * d + i] * y[k];
            }
            y[i] /= self.lower[i * d + i];
        }
        y
    }

    pub fn log_det(&self) -> f64 {
        (0..self.dim).map(|i| self.lower[i * self.dim + i].ln()).sum::<f64>() * 2.0
    }
}

pub fn is_positive_definite(m: &SquareMatrix) -> bool {
    cholesky(m).is_ok()
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    dim: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

pub fn lu_decompose(m: &SquareMatrix) -> Result<Lu> {
    let dim = m.dim();
    let tol = PIVOT_REL_TOL * m.max_abs();
    let mut a = m.data.clone();
    let mut perm: Vec<usize> = (0..dim).collect();
    let mut sign = 1.0;
    for col in 0..dim {
        let mut pivot_row = col;
        let mut best = a[col * dim + col].abs();
        for r in (col + 1)..dim {
            let cand = a[r * dim + col].abs();
            if cand > best {
                best = cand;
                pivot_row = r;
            }
        }
        if !(best > tol) {
            return Err(CwError::SingularCoupling);
        }
        if pivot_row != col {
            for j in 0..dim {
                a.swap(col * dim + j, pivot_row * dim + j);
            }
            perm.swap(col, pivot_row);
            sign = -sign;
        }
        let pivot = a[col * dim + col];
        for r in (col + 1)..dim {
            let factor = a[r * dim + col] / pivot;
            a[r * dim + col] = factor;
            for j in (col + 1)..dim {
                a[r * dim + j] -= factor * a[col * dim + j];
            }
        }
    }
    Ok(Lu { dim, lu: a, perm, sign })
}

impl Lu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim);
        let d = self.dim;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..d {
            for k in 0..i {
                x[i] -= self.lu[i * d + k] * x[k];
            }
        }
        for i in (0..d).rev() {
            for k in (i + 1)..d {
                x[i] -= self.lu[i * d + k] * x[k];
            }
            x[i] /= self.lu[i * d + i];
        }
        x
    }

    pub fn inverse(&self) -> SquareMatrix {
        let d = self.dim;
        let mut inv = SquareMatrix::zero(d);
        let mut e = vec![0.0; d];
        for col in 0..d {
            e[col] = 1.0;
            let x = self.solve(&e);
            e[col] = 0.0;
            for (row, &v) in x.iter().enumerate() {
                inv.set(row, col, v);
            }
        }
        inv
    }

    pub fn det(&self) -> f64 {
        let mut det = self.sign;
        for i in 0..self.dim {
            det *= self.lu[i * self.dim + i];
        }
        det
    }
}

pub fn inverse(m: &SquareMatrix) -> Result<SquareMatrix> {
    Ok(lu_decompose(m)?.inverse())
}
