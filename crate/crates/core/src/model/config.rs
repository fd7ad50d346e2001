// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorPolicy {
    #[default]
    Uniform,
    /// `p(M) ∝ 1 / (|M| + 1)`
    #[serde(alias = "size-penalized")]
    SizePenalized,
}

impl std::str::FromStr for PriorPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "size-penalized" | "size_penalized" => Ok(Self::SizePenalized),
            other => Err(format!("unknown prior policy `{other}` (expected uniform or size-penalized)")),
        }
    }
}

/// How the click at timestep `j` is scored when it arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoringRule {
    /// Fold the click into the statistics first, then score it under the
    /// updated predictive at `time = j`.
    #[default]
    Retrospective,
    /// Score the click under the predictive built from the first `j - 1`
    /// clicks, then fold it in (the strict chain-rule marginal likelihood).
    Sequential,
}

impl std::str::FromStr for ScoringRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "retrospective" => Ok(Self::Retrospective),
            "sequential" => Ok(Self::Sequential),
            other => Err(format!("unknown scoring rule `{other}` (expected retrospective or sequential)")),
        }
    }
}

/// Conjugate prior hyper-parameters. Continuous coordinates are standardized
/// over the full dataset, so these are unit-free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperParams {
    pub kappa0: f64,
    /// `Ψ₀ = psi0_scale · I`
    pub psi0_scale: f64,
    /// `ν₀ = (continuous columns + 1) + nu0_offset`
    pub nu0_offset: f64,
    /// Symmetric Dirichlet pseudocount.
    pub alpha: f64,
    /// Timestep `t` enters the Gaussian as `t / time_horizon`.
    pub time_horizon: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self { kappa0: 3.0, psi0_scale: 3.0, nu0_offset: 2.0, alpha: 0.01, time_horizon: 50.0 }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("kappa0", self.kappa0)?;
        positive("psi0_scale", self.psi0_scale)?;
        positive("alpha", self.alpha)?;
        positive("time_horizon", self.time_horizon)?;
        if !(self.nu0_offset > 1.0) || !self.nu0_offset.is_finite() {
            return Err(ModelError::InvalidConfig(format!("nu0_offset must exceed 1, got {}", self.nu0_offset)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub prior: PriorPolicy,
    #[serde(flatten)]
    pub hyper: HyperParams,
    pub scoring: ScoringRule,
}

impl SessionConfig {
    pub fn with_scoring(mut self, scoring: ScoringRule) -> Self {
        self.scoring = scoring;
        self
    }

    pub fn with_prior(mut self, prior: PriorPolicy) -> Self {
        self.prior = prior;
        self
    }
}
