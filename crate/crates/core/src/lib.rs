// SPDX-License-Identifier: Apache-2.0

//! Online Bayesian model selection over attribute subsets for inferring
//! exploration bias from interaction streams.
//!
//! A [`Session`] holds one user's belief over the `2^d` attribute-subset
//! models of a [`DatasetBundle`]. Feed it events with [`Session::observe`]
//! and read products from [`inference`].

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod eval;
pub mod inference;
pub mod ingest;
pub mod math;
pub mod model;

pub use dataset::{
    AttributeGroup, AttributeKind, CellValue, ColumnStandardization, DataPoint, DatasetBundle, DatasetDocument,
    DatasetError, PointId,
};
pub use inference::{
    attribute_bias, bias_report, predict_next, session_summary, summarize, BiasReport, GroupBias, ModelProbability,
    PredictionItem, PredictionSet, SessionSummary,
};
pub use ingest::{
    filter_hovers, load_dataset, parse_dataset, parse_log, read_log, HoverFilter, LoadError, RawEvent, SessionLog,
};
pub use math::MathError;
pub use model::{
    EventKind, HyperParams, InteractionEvent, ModelBelief, ModelError, ModelSpace, ModelSpec, PriorPolicy, ScoringRule,
    Session, SessionConfig, MAX_GROUPS,
};
