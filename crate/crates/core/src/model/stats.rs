// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetBundle, PointId};
use crate::math::{DirichletState, GaussianStats, MathError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    #[default]
    Click,
    Hover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub point_id: PointId,
    /// 1-based position in the stream.
    pub timestep: usize,
    #[serde(default)]
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell_ms: Option<f64>,
}

impl InteractionEvent {
    pub fn click(point_id: impl Into<PointId>, timestep: usize) -> Self {
        Self { point_id: point_id.into(), timestep, kind: EventKind::Click, dwell_ms: None }
    }
}

/// Shared running statistics that every model slices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    /// Over all standardized continuous columns plus the time coordinate.
    pub gaussian: GaussianStats,
    /// One per discrete group, in schema order.
    pub categorical: Vec<DirichletState>,
    /// Dataset indices of every point interacted with so far.
    pub visited: BTreeSet<usize>,
}

impl SufficientStats {
    pub fn new(dataset: &DatasetBundle, alpha: f64) -> Result<Self, MathError> {
        let categorical = dataset
            .discrete_groups()
            .iter()
            .map(|&g| DirichletState::symmetric(dataset.schema()[g].categories.len(), alpha))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            gaussian: GaussianStats::new(dataset.continuous_columns().len() + 1),
            categorical,
            visited: BTreeSet::new(),
        })
    }

    pub fn event_count(&self) -> usize {
        self.gaussian.n
    }

    /// Coordinate vector of a point at a given timestep.
    pub fn coordinates(dataset: &DatasetBundle, point: usize, timestep: usize, horizon: f64) -> Vec<f64> {
        let mut x = dataset.standardized_row(point).to_vec();
        x.push(timestep as f64 / horizon);
        x
    }

    pub fn fold(
        &mut self,
        dataset: &DatasetBundle,
        point: usize,
        timestep: usize,
        horizon: f64,
    ) -> Result<(), MathError> {
        self.gaussian.push(&Self::coordinates(dataset, point, timestep, horizon))?;
        for (di, state) in self.categorical.iter_mut().enumerate() {
            state.observe(dataset.category(point, di))?;
        }
        self.visited.insert(point);
        Ok(())
    }
}
