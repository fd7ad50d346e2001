// SPDX-License-Identifier: Apache-2.0

//! 1-D posterior predictive by brute-force quadrature of
//! `N(x | mu, s2) p(mu, s2 | data)` over a (mu, ln s2) grid, with the
//! posterior formed as prior × likelihood and no conjugate algebra.

use std::f64::consts::{LN_2, PI};

fn ln_normal(x: f64, mu: f64, s2: f64) -> f64 {
    -0.5 * (2.0 * PI * s2).ln() - (x - mu).powi(2) / (2.0 * s2)
}

pub fn predictive(mu0: f64, kappa0: f64, nu0: f64, psi0: f64, data: &[f64], xs: &[f64]) -> Vec<f64> {
    let (nm, ns) = (1201usize, 801usize);
    let (m_lo, m_hi, s_lo, s_hi) = (-30.0, 30.0, -9.0, 9.0);
    let hm = (m_hi - m_lo) / (nm - 1) as f64;
    let hs = (s_hi - s_lo) / (ns - 1) as f64;
    let mut logw = Vec::with_capacity(nm * ns);
    let mut nodes = Vec::with_capacity(nm * ns);
    for i in 0..nm {
        let mu = m_lo + i as f64 * hm;
        for j in 0..ns {
            let ls = s_lo + j as f64 * hs;
            let s2 = ls.exp();
            // inverse-gamma(nu0/2, psi0/2) density times the ds2 = s2 dls Jacobian
            let mut lw = -(nu0 / 2.0 + 1.0) * ls - psi0 / (2.0 * s2) + ls;
            lw += ln_normal(mu, mu0, s2 / kappa0);
            lw += data.iter().map(|&x| ln_normal(x, mu, s2)).sum::<f64>();
            let edges = u8::from(i == 0 || i == nm - 1) + u8::from(j == 0 || j == ns - 1);
            lw -= f64::from(edges) * LN_2;
            logw.push(lw);
            nodes.push((mu, s2));
        }
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    xs.iter()
        .map(|&x| w.iter().zip(&nodes).map(|(wi, &(mu, s2))| wi * ln_normal(x, mu, s2).exp()).sum::<f64>() / z)
        .collect()
}
