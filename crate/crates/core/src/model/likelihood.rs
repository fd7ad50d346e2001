// SPDX-License-Identifier: Apache-2.0

//! Point likelihoods over the fixed dataset.
//!
//! A model's distribution over `D` is the product of its continuous factor
//! (Student-t density over the included columns plus time, normalized across
//! `D`) and one factor per included discrete group (categorical predictive
//! split evenly among the points sharing that category), renormalized over
//! `D`.

use crate::dataset::DatasetBundle;
use crate::math::{log_normalize, niw_posterior, DirichletState, NiwPrior};

use super::{ModelError, ModelSpec, SufficientStats};

/// Log continuous factor for every point at `time`, normalized across `D`.
/// A slice holding only the time coordinate is constant across points and
/// collapses to the uniform `1/|D|`.
pub(crate) fn continuous_log_factor(
    dataset: &DatasetBundle,
    prior: &NiwPrior,
    stats: &SufficientStats,
    slice: &[usize],
    time: usize,
    horizon: f64,
) -> Result<Vec<f64>, ModelError> {
    let n = dataset.len();
    if slice.len() <= 1 {
        return Ok(vec![-(n as f64).ln(); n]);
    }
    let t = niw_posterior(prior, &stats.gaussian, slice)?.prepare()?;
    let time_coord = dataset.continuous_columns().len();
    let time_value = time as f64 / horizon;
    let p = slice.len();
    let (mut x, mut resid, mut work) = (vec![0.0; p], vec![0.0; p], vec![0.0; p]);
    let mut out: Vec<f64> = (0..n)
        .map(|i| {
            let row = dataset.standardized_row(i);
            for (xj, &c) in x.iter_mut().zip(slice) {
                *xj = if c == time_coord { time_value } else { row[c] };
            }
            t.log_pdf_with(&x, &mut resid, &mut work)
        })
        .collect();
    log_normalize(&mut out)?;
    Ok(out)
}

/// `log f(k(x)) - log |{x' ∈ D : k(x') = k(x)}|` for every point.
pub(crate) fn discrete_log_factor(dataset: &DatasetBundle, state: &DirichletState, ordinal: usize) -> Vec<f64> {
    let pred = state.predictive();
    let counts = dataset.category_counts(ordinal);
    let per_category: Vec<f64> = pred
        .iter()
        .zip(counts)
        .map(|(p, &c)| if c == 0 { f64::NEG_INFINITY } else { p.ln() - (c as f64).ln() })
        .collect();
    (0..dataset.len()).map(|i| per_category[dataset.category(i, ordinal)]).collect()
}

fn combine(continuous: &[f64], discrete: &[&[f64]]) -> Result<Vec<f64>, ModelError> {
    let mut out = continuous.to_vec();
    if discrete.is_empty() {
        return Ok(out);
    }
    for factor in discrete {
        for (o, f) in out.iter_mut().zip(factor.iter()) {
            *o += f;
        }
    }
    log_normalize(&mut out)?;
    Ok(out)
}

/// Per-factor log probabilities for one statistics snapshot at one timestep.
/// Factors are shared between models, so building this once per event keeps
/// the cost at `O(2^c · |D|)` density evaluations plus `O(2^d · |D|)` sums.
#[derive(Debug, Clone)]
pub struct LikelihoodTable {
    time: usize,
    /// Indexed by `ModelSpec::continuous_mask`.
    continuous: Vec<Vec<f64>>,
    /// Indexed by discrete-group ordinal.
    discrete: Vec<Vec<f64>>,
}

impl LikelihoodTable {
    pub fn build(
        dataset: &DatasetBundle,
        prior: &NiwPrior,
        stats: &SufficientStats,
        models: &[ModelSpec],
        time: usize,
        horizon: f64,
    ) -> Result<Self, ModelError> {
        let slots = models.iter().map(|m| m.continuous_mask as usize + 1).max().unwrap_or(1);
        let mut continuous: Vec<Vec<f64>> = vec![Vec::new(); slots];
        for m in models {
            let slot = &mut continuous[m.continuous_mask as usize];
            if slot.is_empty() {
                *slot = continuous_log_factor(dataset, prior, stats, &m.continuous_slice, time, horizon)?;
            }
        }
        let discrete =
            stats.categorical.iter().enumerate().map(|(di, state)| discrete_log_factor(dataset, state, di)).collect();
        Ok(Self { time, continuous, discrete })
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Normalized log probability of every point under `model`.
    pub fn model_log_distribution(&self, model: &ModelSpec) -> Result<Vec<f64>, ModelError> {
        let discrete: Vec<&[f64]> = model.discrete_members.iter().map(|&d| self.discrete[d].as_slice()).collect();
        combine(&self.continuous[model.continuous_mask as usize], &discrete)
    }
}

/// `log p(x | M, C_{1:n}, time)` for a single model and point, where `stats`
/// holds the `n` observations being conditioned on.
pub fn point_log_likelihood(
    model: &ModelSpec,
    stats: &SufficientStats,
    prior: &NiwPrior,
    dataset: &DatasetBundle,
    point: usize,
    time: usize,
    horizon: f64,
) -> Result<f64, ModelError> {
    if point >= dataset.len() {
        return Err(ModelError::UnknownPoint(format!("#{point}")));
    }
    let continuous = continuous_log_factor(dataset, prior, stats, &model.continuous_slice, time, horizon)?;
    let discrete: Vec<Vec<f64>> =
        model.discrete_members.iter().map(|&d| discrete_log_factor(dataset, &stats.categorical[d], d)).collect();
    let refs: Vec<&[f64]> = discrete.iter().map(Vec::as_slice).collect();
    Ok(combine(&continuous, &refs)?[point])
}
