// SPDX-License-Identifier: Apache-2.0

//! The space of attribute-subset models and its online posterior.
//!
//! Every model reads a slice of one shared [`SufficientStats`]; no model
//! keeps state of its own beyond its cumulative log-likelihood.

mod config;
mod likelihood;
mod session;
mod stats;

use serde::{Deserialize, Serialize};

use crate::dataset::AttributeGroup;
use crate::math::MathError;

pub use config::{HyperParams, PriorPolicy, ScoringRule, SessionConfig};
pub use likelihood::{point_log_likelihood, LikelihoodTable};
pub use session::{ModelBelief, ModelSpace, Session};
pub use stats::{EventKind, InteractionEvent, SufficientStats};

/// Exact enumeration costs `2^d · |D|` per event; beyond this a sampling
/// scheme would be needed.
pub const MAX_GROUPS: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("model space too large: {0} attribute groups (max {MAX_GROUPS})")]
    TooManyGroups(usize),
    #[error("schema has no attribute groups")]
    NoGroups,
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown attribute group `{0}`")]
    UnknownGroup(String),
    #[error("event out of order: expected timestep {expected}, got {got}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// One hypothesis: "exploration is driven by exactly these groups".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Bit `g` set ⇔ schema group `g` is included.
    pub mask: u32,
    /// Included schema group indices, ascending.
    pub included: Vec<usize>,
    /// Bit `j` set ⇔ the `j`-th continuous group is included.
    pub continuous_mask: u32,
    /// Coordinate indices into the continuous vector: included continuous
    /// columns followed by the time coordinate.
    pub continuous_slice: Vec<usize>,
    /// Ordinals (among discrete groups) of the included discrete groups.
    pub discrete_members: Vec<usize>,
}

impl ModelSpec {
    pub fn contains(&self, group: usize) -> bool {
        self.mask & (1 << group) != 0
    }

    pub fn size(&self) -> usize {
        self.included.len()
    }

    pub fn has_continuous(&self) -> bool {
        self.continuous_mask != 0
    }

    pub fn names<'a>(&self, schema: &'a [AttributeGroup]) -> Vec<&'a str> {
        self.included.iter().map(|&g| schema[g].name.as_str()).collect()
    }
}

/// All `2^d` subsets of the schema's groups, in ascending bitmask order.
pub fn enumerate_models(schema: &[AttributeGroup]) -> Result<Vec<ModelSpec>, ModelError> {
    let d = schema.len();
    if d == 0 {
        return Err(ModelError::NoGroups);
    }
    if d > MAX_GROUPS {
        return Err(ModelError::TooManyGroups(d));
    }
    // coordinate layout: continuous columns in schema order, then time
    let mut group_coords: Vec<Vec<usize>> = vec![Vec::new(); d];
    let mut continuous_ordinal = vec![usize::MAX; d];
    let mut discrete_ordinal = vec![usize::MAX; d];
    let (mut next_coord, mut nc, mut nd) = (0, 0, 0);
    for (g, group) in schema.iter().enumerate() {
        if group.is_continuous() {
            group_coords[g] = (next_coord..next_coord + group.columns.len()).collect();
            next_coord += group.columns.len();
            continuous_ordinal[g] = nc;
            nc += 1;
        } else {
            discrete_ordinal[g] = nd;
            nd += 1;
        }
    }
    let time_coord = next_coord;

    Ok((0u32..1 << d)
        .map(|mask| {
            let included: Vec<usize> = (0..d).filter(|g| mask & (1 << g) != 0).collect();
            let mut continuous_mask = 0;
            let mut continuous_slice = Vec::new();
            let mut discrete_members = Vec::new();
            for &g in &included {
                if schema[g].is_continuous() {
                    continuous_mask |= 1 << continuous_ordinal[g];
                    continuous_slice.extend_from_slice(&group_coords[g]);
                } else {
                    discrete_members.push(discrete_ordinal[g]);
                }
            }
            continuous_slice.push(time_coord);
            ModelSpec { mask, included, continuous_mask, continuous_slice, discrete_members }
        })
        .collect())
}

/// Normalized log prior per model.
pub fn make_prior(models: &[ModelSpec], policy: PriorPolicy) -> Vec<f64> {
    let weights: Vec<f64> = models
        .iter()
        .map(|m| match policy {
            PriorPolicy::Uniform => 1.0,
            PriorPolicy::SizePenalized => 1.0 / (m.size() as f64 + 1.0),
        })
        .collect();
    prior_from_weights(&weights)
}

/// Normalizes arbitrary positive weights into a log prior.
pub fn prior_from_weights(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| (w / total).ln()).collect()
}
