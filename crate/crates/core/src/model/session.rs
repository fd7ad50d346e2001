// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeGroup, DatasetBundle, PointId};
use crate::math::{log_normalize, Matrix, NiwPrior};

use super::likelihood::LikelihoodTable;
use super::{
    enumerate_models, make_prior, prior_from_weights, EventKind, InteractionEvent, ModelError, ModelSpec, PriorPolicy,
    ScoringRule, SessionConfig, SufficientStats,
};

/// The enumerated models of one schema together with their prior.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpace {
    models: Vec<ModelSpec>,
    log_prior: Vec<f64>,
}

impl ModelSpace {
    pub fn new(schema: &[AttributeGroup], policy: PriorPolicy) -> Result<Self, ModelError> {
        let models = enumerate_models(schema)?;
        let log_prior = make_prior(&models, policy);
        Ok(Self { models, log_prior })
    }

    /// Prior from arbitrary positive weights, one per model in bitmask order.
    pub fn with_weights(schema: &[AttributeGroup], weights: &[f64]) -> Result<Self, ModelError> {
        let models = enumerate_models(schema)?;
        if weights.len() != models.len() || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("need {} positive prior weights", models.len())));
        }
        Ok(Self { log_prior: prior_from_weights(weights), models })
    }

    pub fn models(&self) -> &[ModelSpec] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }
}

/// Log prior plus running `Σ_j log p(c_j | M_i, ·)` per model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBelief {
    pub log_prior: Vec<f64>,
    pub cumulative_log_likelihood: Vec<f64>,
    pub events: usize,
}

impl ModelBelief {
    pub fn new(log_prior: Vec<f64>) -> Self {
        let n = log_prior.len();
        Self { log_prior, cumulative_log_likelihood: vec![0.0; n], events: 0 }
    }

    pub fn log_posterior(&self) -> Vec<f64> {
        let mut lp: Vec<f64> = self.log_prior.iter().zip(&self.cumulative_log_likelihood).map(|(p, l)| p + l).collect();
        // log_prior is finite and normalized, so this cannot fail
        log_normalize(&mut lp).expect("finite log posterior");
        lp
    }

    /// Normalized posterior. Before any event this is the prior exactly.
    pub fn posterior(&self) -> Vec<f64> {
        if self.events == 0 {
            return self.log_prior.iter().map(|l| l.exp()).collect();
        }
        self.log_posterior().iter().map(|l| l.exp()).collect()
    }

    /// Index of the maximum a posteriori model; ties go to the lower index.
    pub fn map_index(&self) -> usize {
        let lp: Vec<f64> = self.log_prior.iter().zip(&self.cumulative_log_likelihood).map(|(p, l)| p + l).collect();
        lp.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best }).0
    }
}

/// One user's running inference state over a fixed dataset.
#[derive(Debug, Clone)]
pub struct Session {
    dataset: Arc<DatasetBundle>,
    space: ModelSpace,
    config: SessionConfig,
    niw: NiwPrior,
    belief: ModelBelief,
    stats: SufficientStats,
    events: Vec<InteractionEvent>,
}

impl Session {
    pub fn new(dataset: Arc<DatasetBundle>, config: SessionConfig) -> Result<Self, ModelError> {
        let space = ModelSpace::new(dataset.schema(), config.prior)?;
        Self::with_space(dataset, space, config)
    }

    pub fn with_space(
        dataset: Arc<DatasetBundle>,
        space: ModelSpace,
        config: SessionConfig,
    ) -> Result<Self, ModelError> {
        config.hyper.validate()?;
        if space.models.len() != 1 << dataset.group_count() {
            return Err(ModelError::InvalidConfig("model space does not match the dataset schema".into()));
        }
        let p = dataset.continuous_columns().len() + 1;
        let niw = NiwPrior::new(
            vec![0.0; p],
            config.hyper.kappa0,
            p as f64 + config.hyper.nu0_offset,
            Matrix::scaled_identity(p, config.hyper.psi0_scale),
        )?;
        let stats = SufficientStats::new(&dataset, config.hyper.alpha)?;
        let belief = ModelBelief::new(space.log_prior.clone());
        Ok(Self { dataset, space, config, niw, belief, stats, events: Vec::new() })
    }

    pub fn dataset(&self) -> &Arc<DatasetBundle> {
        &self.dataset
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn models(&self) -> &[ModelSpec] {
        &self.space.models
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn niw_prior(&self) -> &NiwPrior {
        &self.niw
    }

    pub fn belief(&self) -> &ModelBelief {
        &self.belief
    }

    pub fn stats(&self) -> &SufficientStats {
        &self.stats
    }

    pub fn events(&self) -> &[InteractionEvent] {
        &self.events
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn posterior(&self) -> Vec<f64> {
        self.belief.posterior()
    }

    /// Factor table for scoring candidates at `time` given the current stats.
    pub fn likelihood_table(&self, time: usize) -> Result<LikelihoodTable, ModelError> {
        LikelihoodTable::build(
            &self.dataset,
            &self.niw,
            &self.stats,
            &self.space.models,
            time,
            self.config.hyper.time_horizon,
        )
    }

    /// Applies one event. On error nothing is modified.
    pub fn observe(&mut self, event: InteractionEvent) -> Result<(), ModelError> {
        let expected = self.events.len() + 1;
        if event.timestep != expected {
            return Err(ModelError::OutOfOrder { expected, got: event.timestep });
        }
        let point =
            self.dataset.index_of(&event.point_id).ok_or_else(|| ModelError::UnknownPoint(event.point_id.0.clone()))?;
        let horizon = self.config.hyper.time_horizon;

        let mut next_stats = self.stats.clone();
        next_stats.fold(&self.dataset, point, event.timestep, horizon)?;
        let scoring_stats = match self.config.scoring {
            ScoringRule::Retrospective => &next_stats,
            ScoringRule::Sequential => &self.stats,
        };
        let table = LikelihoodTable::build(
            &self.dataset,
            &self.niw,
            scoring_stats,
            &self.space.models,
            event.timestep,
            horizon,
        )?;
        let deltas = self
            .space
            .models
            .iter()
            .map(|m| table.model_log_distribution(m).map(|d| d[point]))
            .collect::<Result<Vec<f64>, _>>()?;

        for (acc, d) in self.belief.cumulative_log_likelihood.iter_mut().zip(deltas) {
            *acc += d;
        }
        self.belief.events += 1;
        self.stats = next_stats;
        self.events.push(event);
        Ok(())
    }

    /// Appends an event for `point_id` at the next timestep.
    pub fn observe_point(&mut self, point_id: &PointId, kind: EventKind) -> Result<usize, ModelError> {
        let timestep = self.events.len() + 1;
        self.observe(InteractionEvent { point_id: point_id.clone(), timestep, kind, dwell_ms: None })?;
        Ok(timestep)
    }
}
