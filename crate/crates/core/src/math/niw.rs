// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::{MathError, Matrix, StudentTParams};

/// Normal-Inverse-Wishart prior over a Gaussian's mean and covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiwPrior {
    pub mean0: Vec<f64>,
    pub kappa0: f64,
    pub nu0: f64,
    pub psi0: Matrix,
}

impl NiwPrior {
    pub fn new(mean0: Vec<f64>, kappa0: f64, nu0: f64, psi0: Matrix) -> Result<Self, MathError> {
        let prior = Self { mean0, kappa0, nu0, psi0 };
        prior.validate()?;
        Ok(prior)
    }

    pub fn dim(&self) -> usize {
        self.mean0.len()
    }

    pub fn validate(&self) -> Result<(), MathError> {
        let p = self.dim();
        if self.psi0.dim() != p {
            return Err(MathError::DimensionMismatch { expected: p, got: self.psi0.dim() });
        }
        if !(self.kappa0 > 0.0) || !self.kappa0.is_finite() {
            return Err(MathError::InvalidPrior(format!("kappa0 must be positive, got {}", self.kappa0)));
        }
        if !(self.nu0 > p as f64 + 1.0) {
            return Err(MathError::InvalidPrior(format!("nu0 must exceed dim + 1 = {}, got {}", p + 1, self.nu0)));
        }
        if !self.psi0.is_symmetric(0.0) {
            return Err(MathError::InvalidPrior("psi0 is not symmetric".into()));
        }
        super::linalg::Cholesky::new(&self.psi0, 0.0)
            .map_err(|_| MathError::InvalidPrior("psi0 is not positive definite".into()))?;
        Ok(())
    }

    /// Prior restricted to the coordinates in `idx`.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            mean0: idx.iter().map(|&i| self.mean0[i]).collect(),
            kappa0: self.kappa0,
            nu0: self.nu0,
            psi0: self.psi0.select(idx),
        }
    }
}

/// Running count, sum and raw second moment `Σ x xᵀ` of observed vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianStats {
    pub n: usize,
    pub sum: Vec<f64>,
    pub scatter: Matrix,
}

impl GaussianStats {
    pub fn new(dim: usize) -> Self {
        Self { n: 0, sum: vec![0.0; dim], scatter: Matrix::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.sum.len()
    }

    pub fn push(&mut self, x: &[f64]) -> Result<(), MathError> {
        if x.len() != self.dim() {
            return Err(MathError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        self.n += 1;
        for (s, v) in self.sum.iter_mut().zip(x) {
            *s += v;
        }
        self.scatter.add_outer(x, 1.0);
        Ok(())
    }

    pub fn from_batch<'a, I>(dim: usize, rows: I) -> Result<Self, MathError>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut stats = Self::new(dim);
        for row in rows {
            stats.push(row)?;
        }
        Ok(stats)
    }

    /// Statistics of the projected observations.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self { n: self.n, sum: idx.iter().map(|&i| self.sum[i]).collect(), scatter: self.scatter.select(idx) }
    }

    pub fn mean(&self) -> Option<Vec<f64>> {
        (self.n > 0).then(|| self.sum.iter().map(|s| s / self.n as f64).collect())
    }

    /// `Σ (x - x̄)(x - x̄)ᵀ`
    pub fn centered_scatter(&self) -> Matrix {
        let mut s = self.scatter.clone();
        if self.n > 0 {
            s.add_outer(&self.sum, -1.0 / self.n as f64);
        }
        s
    }
}

/// Conjugate NIW update on the block `coord_slice`, returning the multivariate
/// Student-t posterior predictive for that block.
pub fn niw_posterior(
    prior: &NiwPrior,
    stats: &GaussianStats,
    coord_slice: &[usize],
) -> Result<StudentTParams, MathError> {
    if coord_slice.is_empty() {
        return Err(MathError::EmptyContinuousBlock);
    }
    if prior.dim() != stats.dim() {
        return Err(MathError::DimensionMismatch { expected: prior.dim(), got: stats.dim() });
    }
    let prior = prior.select(coord_slice);
    let stats = stats.select(coord_slice);
    let p = coord_slice.len() as f64;
    let n = stats.n as f64;

    let kappa_n = prior.kappa0 + n;
    let nu_n = prior.nu0 + n;
    let mut psi_n = prior.psi0.clone();
    let location = match stats.mean() {
        None => prior.mean0.clone(),
        Some(xbar) => {
            psi_n.add_assign(&stats.centered_scatter());
            let diff: Vec<f64> = xbar.iter().zip(&prior.mean0).map(|(x, m)| x - m).collect();
            psi_n.add_outer(&diff, prior.kappa0 * n / kappa_n);
            prior.mean0.iter().zip(&xbar).map(|(m, x)| (prior.kappa0 * m + n * x) / kappa_n).collect()
        }
    };
    let dof = nu_n - p + 1.0;
    if !(dof > 0.0) {
        return Err(MathError::InvalidPrior(format!("predictive degrees of freedom {dof} <= 0")));
    }
    let scale = psi_n.scale((kappa_n + 1.0) / (kappa_n * dof));
    Ok(StudentTParams { dof, location, scale })
}
