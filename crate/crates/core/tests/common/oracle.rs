// SPDX-License-Identifier: Apache-2.0

//! From-scratch likelihoods: every posterior is rebuilt from the raw click
//! list with dense matrix algebra, sharing nothing with the engine beyond
//! the standardized coordinates.

use std::sync::Arc;

use explorebias_core::{DatasetBundle, EventKind, InteractionEvent, ScoringRule, Session, SessionConfig};
use statrs::function::gamma::ln_gamma;

/// Inverse and log-determinant by Gauss-Jordan with partial pivoting.
fn inverse_and_logdet(mut a: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, f64) {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let mut logdet = 0.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        logdet += d.abs().ln();
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..n {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    (inv, logdet)
}

pub struct Oracle<'a> {
    pub data: &'a DatasetBundle,
    pub kappa0: f64,
    pub nu0: f64,
    pub psi: f64,
    pub alpha: f64,
    pub horizon: f64,
}

impl Oracle<'_> {
    fn coords(&self, point: usize, t: usize, cols: &[usize]) -> Vec<f64> {
        let row = self.data.standardized_row(point);
        let mut v: Vec<f64> = cols.iter().map(|&c| row[c]).collect();
        v.push(t as f64 / self.horizon);
        v
    }

    /// Unnormalized log continuous factor for every point at time `t`.
    fn continuous(&self, obs: &[(usize, usize)], cols: &[usize], t: usize) -> Vec<f64> {
        let n_pts = self.data.len();
        if cols.is_empty() {
            return vec![0.0; n_pts];
        }
        let p = cols.len() + 1;
        let ys: Vec<Vec<f64>> = obs.iter().map(|&(i, tt)| self.coords(i, tt, cols)).collect();
        let n = ys.len() as f64;
        let mean: Vec<f64> =
            (0..p).map(|a| if ys.is_empty() { 0.0 } else { ys.iter().map(|y| y[a]).sum::<f64>() / n }).collect();
        let kn = self.kappa0 + n;
        let nn = self.nu0 + n;
        let mut psi_n = vec![vec![0.0; p]; p];
        for a in 0..p {
            for b in 0..p {
                let scatter: f64 = ys.iter().map(|y| (y[a] - mean[a]) * (y[b] - mean[b])).sum();
                psi_n[a][b] = if a == b { self.psi } else { 0.0 } + scatter + self.kappa0 * n / kn * mean[a] * mean[b];
            }
        }
        let mu_n: Vec<f64> = mean.iter().map(|m| n * m / kn).collect();
        let dof = nn - p as f64 + 1.0;
        let scale: Vec<Vec<f64>> = (0..p)
            .map(|a| (0..p).map(|b| psi_n[a][b] * (kn + 1.0) / (kn * dof) + if a == b { 1e-9 } else { 0.0 }).collect())
            .collect();
        let (inv, logdet) = inverse_and_logdet(scale);
        let pf = p as f64;
        let norm = ln_gamma((dof + pf) / 2.0)
            - ln_gamma(dof / 2.0)
            - pf / 2.0 * (dof * std::f64::consts::PI).ln()
            - logdet / 2.0;
        (0..n_pts)
            .map(|i| {
                let x = self.coords(i, t, cols);
                let r: Vec<f64> = x.iter().zip(&mu_n).map(|(a, b)| a - b).collect();
                let q: f64 = (0..p).map(|a| (0..p).map(|b| r[a] * inv[a][b] * r[b]).sum::<f64>()).sum();
                norm - (dof + pf) / 2.0 * (q / dof).ln_1p()
            })
            .collect()
    }

    fn discrete(&self, obs: &[(usize, usize)], ordinal: usize) -> Vec<f64> {
        let k = self.data.schema()[self.data.discrete_groups()[ordinal]].categories.len();
        let mut counts = vec![0.0; k];
        for &(i, _) in obs {
            counts[self.data.category(i, ordinal)] += 1.0;
        }
        let total = self.alpha * k as f64 + obs.len() as f64;
        let in_data = self.data.category_counts(ordinal);
        (0..self.data.len())
            .map(|i| {
                let c = self.data.category(i, ordinal);
                ((self.alpha + counts[c]) / total / in_data[c] as f64).ln()
            })
            .collect()
    }

    /// `log p(x | M, obs, t)` over `D`, for the model with group mask `mask`.
    pub fn model_log_prob(&self, mask: usize, obs: &[(usize, usize)], t: usize, point: usize) -> f64 {
        let schema = self.data.schema();
        let mut cols = Vec::new();
        let mut logs = vec![0.0; self.data.len()];
        let mut ordinal = 0;
        for (g, group) in schema.iter().enumerate() {
            let included = mask & (1 << g) != 0;
            if group.is_continuous() {
                if included {
                    cols.extend(self.data.group_columns(g));
                }
            } else {
                if included {
                    for (l, d) in logs.iter_mut().zip(self.discrete(obs, ordinal)) {
                        *l += d;
                    }
                }
                ordinal += 1;
            }
        }
        cols.sort_unstable();
        for (l, c) in logs.iter_mut().zip(self.continuous(obs, &cols, t)) {
            *l += c;
        }
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logs.iter().map(|l| (l - max).exp()).sum();
        logs[point] - max - z.ln()
    }
}

/// Largest absolute gap between engine and oracle cumulative
/// log-likelihoods over a replay of `clicks`.
pub fn max_replay_gap(data: Arc<DatasetBundle>, clicks: &[usize], rule: ScoringRule) -> f64 {
    let mut worst = 0.0f64;
    let config = SessionConfig::default().with_scoring(rule);
    let mut session = Session::new(Arc::clone(&data), config).unwrap();
    let h = &config.hyper;
    let oracle = Oracle {
        data: &data,
        kappa0: h.kappa0,
        nu0: (data.continuous_columns().len() + 1) as f64 + h.nu0_offset,
        psi: h.psi0_scale,
        alpha: h.alpha,
        horizon: h.time_horizon,
    };
    let models = 1usize << data.group_count();
    let mut expected = vec![0.0; models];
    for (j, &c) in clicks.iter().enumerate() {
        let t = j + 1;
        session
            .observe(InteractionEvent {
                point_id: data.point_id(c).clone(),
                timestep: t,
                kind: EventKind::Click,
                dwell_ms: None,
            })
            .unwrap();
        let upto = if rule == ScoringRule::Retrospective { t } else { j };
        let obs: Vec<(usize, usize)> = clicks[..upto].iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
        for (m, e) in expected.iter_mut().enumerate() {
            *e += oracle.model_log_prob(m, &obs, t, c);
        }
        let got = &session.belief().cumulative_log_likelihood;
        for m in 0..models {
            worst = worst.max((got[m] - expected[m]).abs());
        }
    }
    worst
}
