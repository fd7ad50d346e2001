// SPDX-License-Identifier: Apache-2.0

//! Small dense row-major matrices. Dimensions here never exceed the number
//! of continuous columns plus one, so nothing fancier is warranted.

use serde::{Deserialize, Serialize};

use super::MathError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = scale;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MathError> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(MathError::DimensionMismatch { expected: dim, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    #[inline]
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

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).take(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn select(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.data[a * idx.len() + b] = self.get(i, j);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self += w * v vᵀ`
    pub fn add_outer(&mut self, v: &[f64], w: f64) {
        debug_assert_eq!(v.len(), self.dim);
        for i in 0..self.dim {
            let wi = w * v[i];
            let row = &mut self.data[i * self.dim..(i + 1) * self.dim];
            for (cell, vj) in row.iter_mut().zip(v) {
                *cell += wi * vj;
            }
        }
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    /// Factorizes `a + jitter * I`.
    pub fn new(a: &Matrix, jitter: f64) -> Result<Self, MathError> {
        let n = a.dim();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j) + jitter;
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(MathError::NotPositiveDefinite { pivot: j, value: d });
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { dim: n, lower: l })
    }

    /// `log |A|`
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.lower[i * self.dim + i].ln()).sum::<f64>()
    }

    /// Squared Mahalanobis norm `rᵀ A⁻¹ r`, via forward substitution. `work`
    /// must have length `dim` and is overwritten.
    pub fn mahalanobis_sq(&self, r: &[f64], work: &mut [f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let mut s = r[i];
            let row = &self.lower[i * n..i * n + i];
            for (k, lik) in row.iter().enumerate() {
                s -= lik * work[k];
            }
            let z = s / self.lower[i * n + i];
            work[i] = z;
            acc += z * z;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = Matrix::from_rows(&[vec![4.0, 2.0, 0.4], vec![2.0, 3.0, 0.5], vec![0.4, 0.5, 2.0]]).unwrap();
        let c = Cholesky::new(&a, 0.0).unwrap();
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| c.lower[i * n + k] * c.lower[j * n + k]).sum();
                assert!((v - a.get(i, j)).abs() < 1e-12);
            }
        }
        // det = 4*(3*2-0.25) - 2*(2*2-0.2) + 0.4*(1-1.2) = 23 - 7.6 - 0.08
        assert!((c.log_det() - 15.32f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn mahalanobis_matches_inverse_in_1d() {
        let a = Matrix::from_rows(&[vec![2.5]]).unwrap();
        let c = Cholesky::new(&a, 0.0).unwrap();
        let mut w = [0.0];
        assert!((c.mahalanobis_sq(&[1.5], &mut w) - 1.5 * 1.5 / 2.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(Cholesky::new(&a, 1e-9), Err(MathError::NotPositiveDefinite { pivot: 1, .. })));
    }

    #[test]
    fn jitter_rescues_singular() {
        let mut a = Matrix::zeros(2);
        a.add_outer(&[1.0, 1.0], 1.0);
        assert!(Cholesky::new(&a, 0.0).is_err());
        assert!(Cholesky::new(&a, 1e-9).is_ok());
    }
}
