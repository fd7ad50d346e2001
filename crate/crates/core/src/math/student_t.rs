// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::linalg::Cholesky;
use super::{MathError, Matrix, CHOLESKY_JITTER};

/// Multivariate Student-t parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentTParams {
    pub dof: f64,
    pub location: Vec<f64>,
    pub scale: Matrix,
}

impl StudentTParams {
    pub fn dim(&self) -> usize {
        self.location.len()
    }

    /// Factorizes the scale once so that many points can be scored cheaply.
    pub fn prepare(&self) -> Result<PreparedStudentT, MathError> {
        if !(self.dof > 0.0) {
            return Err(MathError::Degenerate("Student-t with non-positive degrees of freedom"));
        }
        let chol = Cholesky::new(&self.scale, CHOLESKY_JITTER)?;
        let p = self.dim() as f64;
        let log_norm = ln_gamma((self.dof + p) / 2.0)
            - ln_gamma(self.dof / 2.0)
            - 0.5 * p * (self.dof * std::f64::consts::PI).ln()
            - 0.5 * chol.log_det();
        Ok(PreparedStudentT { dof: self.dof, location: self.location.clone(), chol, log_norm })
    }
}

/// A Student-t with its scale already factorized.
#[derive(Debug, Clone)]
pub struct PreparedStudentT {
    dof: f64,
    location: Vec<f64>,
    chol: Cholesky,
    log_norm: f64,
}

impl PreparedStudentT {
    /// Log density at the mode.
    pub fn log_normalizer(&self) -> f64 {
        self.log_norm
    }

    pub fn log_pdf(&self, x: &[f64]) -> Result<f64, MathError> {
        let p = self.location.len();
        if x.len() != p {
            return Err(MathError::DimensionMismatch { expected: p, got: x.len() });
        }
        let mut resid = vec![0.0; p];
        let mut work = vec![0.0; p];
        Ok(self.log_pdf_with(x, &mut resid, &mut work))
    }

    /// Allocation-free variant for hot loops; `resid` and `work` must both
    /// have length `dim`.
    #[inline]
    pub fn log_pdf_with(&self, x: &[f64], resid: &mut [f64], work: &mut [f64]) -> f64 {
        for ((r, xi), mi) in resid.iter_mut().zip(x).zip(&self.location) {
            *r = xi - mi;
        }
        let delta = self.chol.mahalanobis_sq(resid, work);
        let p = self.location.len() as f64;
        self.log_norm - 0.5 * (self.dof + p) * (delta / self.dof).ln_1p()
    }
}

pub fn student_t_log_pdf(x: &[f64], params: &StudentTParams) -> Result<f64, MathError> {
    params.prepare()?.log_pdf(x)
}
