// SPDX-License-Identifier: Apache-2.0

//! Conjugate-Bayesian primitives used by every model in the space.
//!
//! Everything here is a pure function over immutable inputs. Probabilities
//! are carried in log space and only leave it through [`log_sum_exp`].

mod dirichlet;
pub(crate) mod linalg;
mod logspace;
mod niw;
mod student_t;

pub use dirichlet::{categorical_predictive, DirichletState};
pub use linalg::Matrix;
pub use logspace::{log_normalize, log_sum_exp};
pub use niw::{niw_posterior, GaussianStats, NiwPrior};
pub use student_t::{student_t_log_pdf, PreparedStudentT, StudentTParams};

/// Diagonal jitter added to every scale matrix before factorization.
pub const CHOLESKY_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MathError {
    #[error("degenerate distribution: {0}")]
    Degenerate(&'static str),
    #[error("empty continuous block")]
    EmptyContinuousBlock,
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("category index {index} outside domain of size {size}")]
    UnknownCategory { index: usize, size: usize },
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
}
