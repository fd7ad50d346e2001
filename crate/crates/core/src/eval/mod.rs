// SPDX-License-Identifier: Apache-2.0

//! Desk-scale evaluation: the attribute-distribution baseline, synthetic
//! sessions with known ground truth, and replay scoring.

mod baseline;
mod hypothesis;
mod replay;
mod synthetic;

pub use baseline::{attribute_distribution_bias, conjunction, BaselineScorer};
pub use hypothesis::{chi_square_gof, kolmogorov_survival, ks_two_sample, TestResult};
pub use replay::{
    first_crossing, replay_and_score, Aggregate, EvalReport, MeanSe, RecoverySummary, ReplayConfig, SessionReport,
    StepRecord, KS_VARIANT,
};
pub use synthetic::{
    crime_like_dataset, generate_batch, generate_session, Focus, ResolvedStrategy, SyntheticSession, SyntheticStrategy,
    Target, CRIME_CATEGORIES, CRIME_PROPORTIONS,
};

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("sample is empty")]
    EmptySample,
    #[error("no interactions to score")]
    NoInteractions,
    #[error("observed and expected have different lengths ({observed} vs {expected})")]
    LengthMismatch { observed: usize, expected: usize },
    #[error("expected proportion for cell {0} is not positive")]
    ZeroExpected(usize),
    #[error("invalid expected proportions: {0}")]
    InvalidProportions(String),
    #[error("unknown attribute group `{0}`")]
    UnknownGroup(String),
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error("no dataset point satisfies the strategy constraints")]
    EmptyConstraintSet,
    #[error(transparent)]
    Model(#[from] ModelError),
}
