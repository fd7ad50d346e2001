// SPDX-License-Identifier: Apache-2.0

//! The three products read off a session: per-group bias, model-averaged
//! next-interaction predictions, and a parametric summary of what was
//! explored.

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetBundle, PointId};
use crate::math::{niw_posterior, NiwPrior};
use crate::model::{ModelError, ModelSpec, Session, SufficientStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelProbability {
    pub included: Vec<String>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupBias {
    pub name: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub event_count: usize,
    pub groups: Vec<GroupBias>,
    pub posterior: Vec<ModelProbability>,
    pub map_model: Vec<String>,
}

/// `Σ_{M ∋ group} p(M | C)` over an already-normalized posterior, clamped
/// against rounding above 1.
pub fn marginal_bias(models: &[ModelSpec], posterior: &[f64], group: usize) -> f64 {
    models.iter().zip(posterior).filter(|(m, _)| m.contains(group)).map(|(_, p)| p).sum::<f64>().min(1.0)
}

pub fn attribute_bias(session: &Session, group: &str) -> Result<f64, ModelError> {
    let g = session.dataset().group_index(group).ok_or_else(|| ModelError::UnknownGroup(group.to_owned()))?;
    Ok(marginal_bias(session.models(), &session.posterior(), g))
}

pub fn model_posterior(session: &Session) -> Vec<ModelProbability> {
    let schema = session.dataset().schema();
    session
        .models()
        .iter()
        .zip(session.posterior())
        .map(|(m, probability)| ModelProbability {
            included: m.names(schema).into_iter().map(str::to_owned).collect(),
            probability,
        })
        .collect()
}

pub fn bias_report(session: &Session) -> BiasReport {
    let schema = session.dataset().schema();
    let posterior = session.posterior();
    let groups = schema
        .iter()
        .enumerate()
        .map(|(g, group)| GroupBias {
            name: group.name.clone(),
            probability: marginal_bias(session.models(), &posterior, g),
        })
        .collect();
    let map = &session.models()[session.belief().map_index()];
    BiasReport {
        event_count: session.event_count(),
        groups,
        posterior: model_posterior(session),
        map_model: map.names(schema).into_iter().map(str::to_owned).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionItem {
    pub point_id: PointId,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub event_count: usize,
    pub target_timestep: usize,
    pub k: usize,
    pub exclude_visited: bool,
    pub items: Vec<PredictionItem>,
}

impl PredictionSet {
    pub fn contains(&self, id: &PointId) -> bool {
        self.items.iter().any(|i| &i.point_id == id)
    }
}

/// Model-averaged `p(x | C_{1:t}, time = t + 1)` for every point.
pub fn next_point_distribution(session: &Session) -> Result<Vec<f64>, ModelError> {
    let table = session.likelihood_table(session.event_count() + 1)?;
    let mut out = vec![0.0; session.dataset().len()];
    for (model, weight) in session.models().iter().zip(session.posterior()) {
        if weight == 0.0 {
            continue;
        }
        for (o, l) in out.iter_mut().zip(table.model_log_distribution(model)?) {
            *o += weight * l.exp();
        }
    }
    Ok(out)
}

/// Ranks points by model-averaged probability; ties broken by ascending id.
pub fn rank_points(dataset: &DatasetBundle, scores: &[f64], visited: Option<&SufficientStats>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dataset.len()).filter(|i| visited.is_none_or(|s| !s.visited.contains(i))).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then_with(|| dataset.point_id(a).cmp(dataset.point_id(b))));
    order
}

pub fn predict_next(session: &Session, k: usize, exclude_visited: bool) -> Result<PredictionSet, ModelError> {
    if k == 0 {
        return Err(ModelError::InvalidConfig("k must be at least 1".into()));
    }
    let scores = next_point_distribution(session)?;
    let dataset = session.dataset();
    let order = rank_points(dataset, &scores, exclude_visited.then(|| session.stats()));
    let items = order
        .into_iter()
        .take(k)
        .map(|i| PredictionItem { point_id: dataset.point_id(i).clone(), probability: scores[i] })
        .collect();
    Ok(PredictionSet {
        event_count: session.event_count(),
        target_timestep: session.event_count() + 1,
        k,
        exclude_visited,
        items,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSummary {
    pub group: String,
    pub columns: Vec<String>,
    pub dof: f64,
    /// Predictive location in raw attribute units.
    pub location: Vec<f64>,
    /// Predictive scale matrix in raw attribute units.
    pub scale: Vec<Vec<f64>>,
    /// Marginal location and scale of the time coordinate, in timesteps.
    pub time_location: f64,
    pub time_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryProbability {
    pub category: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSummary {
    pub group: String,
    pub categories: Vec<CategoryProbability>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub event_count: usize,
    pub continuous: Vec<ContinuousSummary>,
    pub discrete: Vec<DiscreteSummary>,
}

/// Per-group fitted distributions from the full (all-attribute) statistics,
/// independent of which model currently leads.
pub fn summarize(
    stats: &SufficientStats,
    prior: &NiwPrior,
    dataset: &DatasetBundle,
    time_horizon: f64,
) -> Result<SessionSummary, ModelError> {
    let time_coord = dataset.continuous_columns().len();
    let standardization = dataset.standardization();
    let mut continuous = Vec::new();
    for (g, group) in dataset.schema().iter().enumerate().filter(|(_, g)| g.is_continuous()) {
        let cols = dataset.group_columns(g);
        let mut slice = cols.clone();
        slice.push(time_coord);
        let t = niw_posterior(prior, &stats.gaussian, &slice)?;
        let p = cols.len();
        let location = cols.iter().enumerate().map(|(a, &c)| standardization[c].destandardize(t.location[a])).collect();
        let scale = (0..p)
            .map(|a| {
                (0..p)
                    .map(|b| t.scale.get(a, b) * standardization[cols[a]].std_dev * standardization[cols[b]].std_dev)
                    .collect()
            })
            .collect();
        continuous.push(ContinuousSummary {
            group: group.name.clone(),
            columns: group.columns.clone(),
            dof: t.dof,
            location,
            scale,
            time_location: t.location[p] * time_horizon,
            time_scale: t.scale.get(p, p) * time_horizon * time_horizon,
        });
    }
    let discrete = dataset
        .discrete_groups()
        .iter()
        .zip(&stats.categorical)
        .map(|(&g, state)| DiscreteSummary {
            group: dataset.schema()[g].name.clone(),
            categories: dataset.schema()[g]
                .categories
                .iter()
                .zip(state.predictive())
                .map(|(c, probability)| CategoryProbability { category: c.clone(), probability })
                .collect(),
        })
        .collect();
    Ok(SessionSummary { event_count: stats.event_count(), continuous, discrete })
}

pub fn session_summary(session: &Session) -> Result<SessionSummary, ModelError> {
    summarize(session.stats(), session.niw_prior(), session.dataset(), session.config().hyper.time_horizon)
}
