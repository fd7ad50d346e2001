// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `Q_KS(λ) = 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² λ²)`, the Kolmogorov
/// distribution's survival function. Small `λ` uses the Jacobi-transformed
/// series, which converges there in a handful of terms.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        let c = PI * PI / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for j in 1..=64u32 {
            let k = f64::from(2 * j - 1);
            let term = (-k * k * c).exp();
            sum += term;
            if term < 1e-20 * sum {
                break;
            }
        }
        1.0 - (2.0 * PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for j in 1..=64u32 {
            let jf = f64::from(j);
            let term = (-2.0 * jf * jf * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-20 * sum.abs() {
                break;
            }
            sign = -sign;
        }
        2.0 * sum
    };
    q.clamp(0.0, 1.0)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Largest gap between the two empirical CDFs; inputs must be sorted.
pub(crate) fn ks_statistic_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

pub(crate) fn ks_sorted(a: &[f64], b: &[f64]) -> Result<TestResult, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::EmptySample);
    }
    let d = ks_statistic_sorted(a, b);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    Ok(TestResult { statistic: d, p_value: kolmogorov_survival(lambda) })
}

/// Two-sided two-sample Kolmogorov–Smirnov test, asymptotic distribution
/// with the `en + 0.12 + 0.11/en` effective-size correction.
pub fn ks_two_sample(sample_a: &[f64], sample_b: &[f64]) -> Result<TestResult, EvalError> {
    if sample_a.iter().chain(sample_b).any(|x| x.is_nan()) {
        return Err(EvalError::InvalidProportions("NaN in KS sample".into()));
    }
    ks_sorted(&sorted(sample_a), &sorted(sample_b))
}

/// Pearson goodness of fit with `K - 1` degrees of freedom.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<TestResult, EvalError> {
    if observed.len() != expected.len() {
        return Err(EvalError::LengthMismatch { observed: observed.len(), expected: expected.len() });
    }
    if observed.len() < 2 {
        return Err(EvalError::InvalidProportions("need at least two categories".into()));
    }
    if let Some(i) = expected.iter().position(|&p| !(p > 0.0)) {
        return Err(EvalError::ZeroExpected(i));
    }
    let total_p: f64 = expected.iter().sum();
    if !total_p.is_finite() || (total_p - 1.0).abs() > 1e-9 {
        return Err(EvalError::InvalidProportions(format!("sum to {total_p}, not 1")));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(EvalError::EmptySample);
    }
    let n = n as f64;
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let p_value = if statistic > 0.0 { gamma_ur(df / 2.0, statistic / 2.0).clamp(0.0, 1.0) } else { 1.0 };
    Ok(TestResult { statistic, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn identical_samples() {
        let a = linspace(0.0, 1.0, 25);
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn disjoint_supports() {
        let r = ks_two_sample(&linspace(0.0, 0.1, 30), &linspace(0.9, 1.0, 30)).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn half_overlap() {
        let r = ks_two_sample(&linspace(0.0, 1.0, 100), &linspace(0.0, 0.5, 100)).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-12);
        // en = √50, λ = (√50 + 0.12 + 0.11/√50)·0.5, series evaluated in mpmath
        assert!((r.p_value - 1.055_344_553_040_074_1e-11).abs() < 1e-20, "{}", r.p_value);
    }

    #[test]
    fn kolmogorov_branches_agree() {
        for lambda in [1.1, 1.15, 1.18, 1.2, 1.25] {
            let c = PI * PI / (8.0 * lambda * lambda);
            let jacobi = 1.0
                - (2.0 * PI).sqrt() / lambda
                    * (1..40).map(|j| (-(f64::from(2 * j - 1)).powi(2) * c).exp()).sum::<f64>();
            let direct = 2.0
                * (1..40).map(|j| (-1f64).powi(j - 1) * (-2.0 * f64::from(j * j) * lambda * lambda).exp()).sum::<f64>();
            assert!((jacobi - direct).abs() < 1e-14);
            assert!((kolmogorov_survival(lambda) - direct).abs() < 1e-14);
        }
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(0.2) > 0.999_999);
    }

    #[test]
    fn empty_sample_rejected() {
        assert_eq!(ks_two_sample(&[], &[1.0]), Err(EvalError::EmptySample));
    }

    #[test]
    fn chi_square_examples() {
        let r = chi_square_gof(&[10, 0, 0], &[1.0 / 3.0; 3]).unwrap();
        assert!((r.statistic - 20.0).abs() < 1e-12);
        // e^{-10}, the df = 2 tail at 20
        assert!((r.p_value - 4.539_992_976_248_485e-5).abs() < 1e-15);
        assert_eq!(chi_square_gof(&[5, 5], &[0.5, 0.5]).unwrap(), TestResult { statistic: 0.0, p_value: 1.0 });
        assert_eq!(chi_square_gof(&[2, 4, 6], &[1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]).unwrap().p_value, 1.0);
    }

    #[test]
    fn chi_square_errors() {
        assert_eq!(chi_square_gof(&[1, 1], &[1.0, 0.0]), Err(EvalError::ZeroExpected(1)));
        assert!(matches!(chi_square_gof(&[1, 1], &[0.4, 0.4]), Err(EvalError::InvalidProportions(_))));
        assert_eq!(chi_square_gof(&[0, 0], &[0.5, 0.5]), Err(EvalError::EmptySample));
        assert!(matches!(chi_square_gof(&[1], &[0.5, 0.5]), Err(EvalError::LengthMismatch { .. })));
    }

    proptest! {
        #[test]
        fn p_values_in_unit_interval(
            a in prop::collection::vec(-5.0..5.0f64, 1..40),
            b in prop::collection::vec(-5.0..5.0f64, 1..40),
        ) {
            let r = ks_two_sample(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            prop_assert!((0.0..=1.0).contains(&r.statistic));
            let s = ks_two_sample(&b, &a).unwrap();
            prop_assert_eq!(r, s);
        }

        #[test]
        fn chi_square_p_in_unit_interval(obs in prop::collection::vec(0u64..50, 2..8)) {
            prop_assume!(obs.iter().sum::<u64>() > 0);
            let k = obs.len();
            let r = chi_square_gof(&obs, &vec![1.0 / k as f64; k]).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }
}
