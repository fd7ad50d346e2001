// SPDX-License-Identifier: Apache-2.0

//! Replays logged sessions through a fresh [`Session`] and records bias
//! curves, baseline curves and top-k hit rates.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetBundle;
use crate::inference::{marginal_bias, next_point_distribution, rank_points};
use crate::ingest::SessionLog;
use crate::model::{Session, SessionConfig};

use super::baseline::{conjunction, BaselineScorer};
use super::EvalError;

pub const KS_VARIANT: &str = "asymptotic Kolmogorov, effective-size corrected";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayConfig {
    pub session: SessionConfig,
    /// Ascending, deduplicated on construction of the report.
    pub k_grid: Vec<usize>,
    /// Predictions are scored once at least this many events are observed.
    pub warmup: usize,
    /// Ground-truth groups, when known.
    pub truth: Option<Vec<String>>,
    pub baseline: bool,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        Self { session: SessionConfig::default(), k_grid: vec![1, 5, 10, 20], warmup: 3, truth: None, baseline: true }
    }
}

/// State after the first `t` events of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    /// Per schema group.
    pub bias: Vec<f64>,
    /// Per schema group; empty when the baseline is disabled.
    pub baseline: Vec<f64>,
    pub map_model: Vec<String>,
    /// Posterior mass on models containing every ground-truth group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_bias: Option<f64>,
    /// Conjunction of baseline scores over the ground-truth groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_baseline: Option<f64>,
    /// Whether event `t + 1` is in the top-k, per k in the grid. Empty when
    /// not scored (before warmup, or at the last event).
    pub hits_excluding_visited: Vec<bool>,
    pub hits_including_visited: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub session_id: String,
    pub event_count: usize,
    pub steps: Vec<StepRecord>,
    pub predictions_scored: usize,
    /// Per k; `None` when no prediction was scored.
    pub hit_rate_excluding_visited: Option<Vec<f64>>,
    pub hit_rate_including_visited: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std_err: f64::NAN, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std_err, n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// `[t - 1][group]` over sessions that reached `t` events.
    pub bias: Vec<Vec<MeanSe>>,
    /// Same shape as `bias`; rows are empty when the baseline is disabled.
    pub baseline: Vec<Vec<MeanSe>>,
    /// `[t - 1]`, present when ground truth was configured.
    pub truth_bias: Vec<MeanSe>,
    pub truth_baseline: Vec<MeanSe>,
    /// Per k, over sessions with at least one scored prediction; empty if
    /// no session had one.
    pub hit_rate_excluding_visited: Vec<MeanSe>,
    pub hit_rate_including_visited: Vec<MeanSe>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub groups: Vec<String>,
    pub k_grid: Vec<usize>,
    pub warmup: usize,
    pub ks_variant: String,
    pub truth: Option<Vec<String>>,
    pub sessions: Vec<SessionReport>,
    pub aggregate: Aggregate,
}

fn column(rows: &[&StepRecord], f: impl Fn(&StepRecord) -> Option<f64>) -> MeanSe {
    MeanSe::of(&rows.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
}

impl Aggregate {
    pub fn from_sessions(sessions: &[SessionReport], group_count: usize, k_count: usize) -> Self {
        let horizon = sessions.iter().map(|s| s.steps.len()).max().unwrap_or(0);
        let at = |t: usize| sessions.iter().filter_map(|s| s.steps.get(t)).collect::<Vec<_>>();
        let mut agg = Aggregate {
            bias: Vec::with_capacity(horizon),
            baseline: Vec::with_capacity(horizon),
            truth_bias: Vec::new(),
            truth_baseline: Vec::new(),
            hit_rate_excluding_visited: Vec::new(),
            hit_rate_including_visited: Vec::new(),
        };
        for t in 0..horizon {
            let rows = at(t);
            agg.bias.push((0..group_count).map(|g| column(&rows, |r| r.bias.get(g).copied())).collect());
            let baseline = if rows.iter().any(|r| !r.baseline.is_empty()) {
                (0..group_count).map(|g| column(&rows, |r| r.baseline.get(g).copied())).collect()
            } else {
                Vec::new()
            };
            agg.baseline.push(baseline);
            if rows.iter().any(|r| r.truth_bias.is_some()) {
                agg.truth_bias.push(column(&rows, |r| r.truth_bias));
            }
            if rows.iter().any(|r| r.truth_baseline.is_some()) {
                agg.truth_baseline.push(column(&rows, |r| r.truth_baseline));
            }
        }
        let rate = |f: fn(&SessionReport) -> &Option<Vec<f64>>, k: usize| {
            MeanSe::of(&sessions.iter().filter_map(|s| f(s).as_ref().map(|r| r[k])).collect::<Vec<_>>())
        };
        if sessions.iter().any(|s| s.predictions_scored > 0) {
            agg.hit_rate_excluding_visited = (0..k_count).map(|k| rate(|s| &s.hit_rate_excluding_visited, k)).collect();
            agg.hit_rate_including_visited = (0..k_count).map(|k| rate(|s| &s.hit_rate_including_visited, k)).collect();
        }
        agg
    }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per session × timestep × metric.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("session_id\tt\tmetric\tkey\tvalue\n");
        for s in &self.sessions {
            for step in &s.steps {
                let mut row = |metric: &str, key: &str, v: f64| {
                    writeln!(out, "{}\t{}\t{metric}\t{key}\t{v}", s.session_id, step.t).expect("write to string")
                };
                for (g, name) in self.groups.iter().enumerate() {
                    row("bias", name, step.bias[g]);
                    if let Some(b) = step.baseline.get(g) {
                        row("baseline", name, *b);
                    }
                }
                if let Some(v) = step.truth_bias {
                    row("truth_bias", "", v);
                }
                if let Some(v) = step.truth_baseline {
                    row("truth_baseline", "", v);
                }
                for (i, k) in self.k_grid.iter().enumerate() {
                    if let Some(h) = step.hits_excluding_visited.get(i) {
                        row("hit_excluding_visited", &k.to_string(), f64::from(u8::from(*h)));
                    }
                    if let Some(h) = step.hits_including_visited.get(i) {
                        row("hit_including_visited", &k.to_string(), f64::from(u8::from(*h)));
                    }
                }
            }
        }
        out
    }

    pub fn recompute_aggregate(&self) -> Aggregate {
        Aggregate::from_sessions(&self.sessions, self.groups.len(), self.k_grid.len())
    }

    /// Ground-truth recovery numbers; requires `truth` in the config.
    pub fn recovery(&self, map_by: usize, bias_at: usize, threshold: f64) -> Option<RecoverySummary> {
        let truth = self.truth.as_ref()?;
        let mut truth_sorted: Vec<&String> = truth.iter().collect();
        truth_sorted.sort();
        let recovered = self
            .sessions
            .iter()
            .filter(|s| {
                s.steps.get(map_by - 1).is_some_and(|step| {
                    let mut m: Vec<&String> = step.map_model.iter().collect();
                    m.sort();
                    m == truth_sorted
                })
            })
            .count();
        let at: Vec<f64> = self.sessions.iter().filter_map(|s| s.steps.get(bias_at - 1)?.truth_bias).collect();
        let crossing = |f: fn(&StepRecord) -> Option<f64>| {
            let v: Vec<f64> = self
                .sessions
                .iter()
                .map(|s| {
                    let curve: Vec<f64> = s.steps.iter().map(|r| f(r).unwrap_or(0.0)).collect();
                    first_crossing(&curve, threshold).unwrap_or(curve.len() + 1) as f64
                })
                .collect();
            MeanSe::of(&v)
        };
        Some(RecoverySummary {
            sessions: self.sessions.len(),
            map_by,
            map_recovery_rate: recovered as f64 / self.sessions.len().max(1) as f64,
            bias_at,
            mean_truth_bias: MeanSe::of(&at),
            threshold,
            clicks_to_threshold: crossing(|r| r.truth_bias),
            baseline_clicks_to_threshold: crossing(|r| r.truth_baseline),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverySummary {
    pub sessions: usize,
    pub map_by: usize,
    pub map_recovery_rate: f64,
    pub bias_at: usize,
    pub mean_truth_bias: MeanSe,
    pub threshold: f64,
    /// Sessions that never cross count as `clicks + 1`.
    pub clicks_to_threshold: MeanSe,
    pub baseline_clicks_to_threshold: MeanSe,
}

/// First `t` (1-based) with `curve[t - 1] >= threshold`.
pub fn first_crossing(curve: &[f64], threshold: f64) -> Option<usize> {
    curve.iter().position(|&v| v >= threshold).map(|i| i + 1)
}

fn replay_one(
    dataset: &Arc<DatasetBundle>,
    scorer: Option<&BaselineScorer>,
    log: &SessionLog,
    config: &ReplayConfig,
    truth: Option<&[usize]>,
) -> Result<SessionReport, EvalError> {
    let mut session = Session::new(Arc::clone(dataset), config.session)?;
    let events = log.interaction_events();
    let next_index = events
        .iter()
        .map(|e| {
            dataset.index_of(&e.point_id).ok_or_else(|| crate::model::ModelError::UnknownPoint(e.point_id.0.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let group_count = dataset.group_count();
    let k_max = config.k_grid.iter().copied().max().unwrap_or(0);
    let mut steps = Vec::with_capacity(events.len());
    let mut scored = 0;
    let mut hits_ex = vec![0usize; config.k_grid.len()];
    let mut hits_in = vec![0usize; config.k_grid.len()];

    for (j, event) in events.into_iter().enumerate() {
        session.observe(event)?;
        let t = j + 1;
        let posterior = session.posterior();
        let models = session.models();
        let bias: Vec<f64> = (0..group_count).map(|g| marginal_bias(models, &posterior, g)).collect();
        let baseline = match scorer {
            Some(s) => {
                (0..group_count).map(|g| s.score(dataset, &next_index[..t], g)).collect::<Result<Vec<_>, _>>()?
            }
            None => Vec::new(),
        };
        let truth_bias = truth.map(|tg| {
            models
                .iter()
                .zip(&posterior)
                .filter(|(m, _)| tg.iter().all(|&g| m.contains(g)))
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0)
        });
        let truth_baseline = truth
            .filter(|_| scorer.is_some())
            .map(|tg| conjunction(&tg.iter().map(|&g| baseline[g]).collect::<Vec<_>>()));
        let map = &models[session.belief().map_index()];

        let (mut hx, mut hi) = (Vec::new(), Vec::new());
        if t >= config.warmup && t < next_index.len() && k_max > 0 {
            let target = next_index[t];
            let scores = next_point_distribution(&session)?;
            let rank = |exclude: bool| {
                rank_points(dataset, &scores, exclude.then(|| session.stats()))
                    .iter()
                    .take(k_max)
                    .position(|&i| i == target)
            };
            let (rx, ri) = (rank(true), rank(false));
            hx = config.k_grid.iter().map(|&k| rx.is_some_and(|r| r < k)).collect();
            hi = config.k_grid.iter().map(|&k| ri.is_some_and(|r| r < k)).collect();
            for (i, (&a, &b)) in hx.iter().zip(&hi).enumerate() {
                hits_ex[i] += usize::from(a);
                hits_in[i] += usize::from(b);
            }
            scored += 1;
        }
        steps.push(StepRecord {
            t,
            bias,
            baseline,
            map_model: map.names(dataset.schema()).into_iter().map(str::to_owned).collect(),
            truth_bias,
            truth_baseline,
            hits_excluding_visited: hx,
            hits_including_visited: hi,
        });
    }
    let rate = |h: &[usize]| (scored > 0).then(|| h.iter().map(|&c| c as f64 / scored as f64).collect());
    Ok(SessionReport {
        session_id: log.session_id.clone(),
        event_count: steps.len(),
        predictions_scored: scored,
        hit_rate_excluding_visited: rate(&hits_ex),
        hit_rate_including_visited: rate(&hits_in),
        steps,
    })
}

/// Replays every log independently (in parallel) and aggregates afterwards.
pub fn replay_and_score(
    dataset: &Arc<DatasetBundle>,
    logs: &[SessionLog],
    config: &ReplayConfig,
) -> Result<EvalReport, EvalError> {
    let mut config = config.clone();
    config.k_grid.sort_unstable();
    config.k_grid.dedup();
    config.k_grid.retain(|&k| k > 0);
    let truth = config
        .truth
        .as_ref()
        .map(|names| {
            names
                .iter()
                .map(|n| dataset.group_index(n).ok_or_else(|| EvalError::UnknownGroup(n.clone())))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let scorer = config.baseline.then(|| BaselineScorer::new(dataset));
    let sessions = logs
        .par_iter()
        .map(|log| replay_one(dataset, scorer.as_ref(), log, &config, truth.as_deref()))
        .collect::<Result<Vec<_>, _>>()?;
    let aggregate = Aggregate::from_sessions(&sessions, dataset.group_count(), config.k_grid.len());
    Ok(EvalReport {
        groups: dataset.schema().iter().map(|g| g.name.clone()).collect(),
        k_grid: config.k_grid,
        warmup: config.warmup,
        ks_variant: KS_VARIANT.to_owned(),
        truth: config.truth,
        sessions,
        aggregate,
    })
}
