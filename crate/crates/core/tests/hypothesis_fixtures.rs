// SPDX-License-Identifier: Apache-2.0

use explorebias_core::eval::{chi_square_gof, ks_two_sample};
use serde::Deserialize;

#[derive(Deserialize)]
struct KsCase {
    a: Vec<f64>,
    b: Vec<f64>,
    statistic: f64,
    p_value: f64,
}

#[derive(Deserialize)]
struct ChiCase {
    observed: Vec<u64>,
    expected: Vec<f64>,
    statistic: f64,
    p_value: f64,
}

#[derive(Deserialize)]
struct Reference {
    ks: Vec<KsCase>,
    chi_square: Vec<ChiCase>,
}

const TOLERANCE: f64 = 1e-6;

fn reference() -> Reference {
    serde_json::from_str(include_str!("fixtures/hypothesis_reference.json")).unwrap()
}

#[test]
fn ks_matches_reference() {
    let r = reference();
    assert_eq!(r.ks.len(), 50);
    for (i, c) in r.ks.iter().enumerate() {
        let got = ks_two_sample(&c.a, &c.b).unwrap();
        assert!((got.statistic - c.statistic).abs() < 1e-12, "case {i}: D {} vs {}", got.statistic, c.statistic);
        assert!((got.p_value - c.p_value).abs() < TOLERANCE, "case {i}: p {} vs {}", got.p_value, c.p_value);
    }
}

#[test]
fn chi_square_matches_reference() {
    let r = reference();
    assert_eq!(r.chi_square.len(), 50);
    for (i, c) in r.chi_square.iter().enumerate() {
        let got = chi_square_gof(&c.observed, &c.expected).unwrap();
        assert!((got.statistic - c.statistic).abs() < 1e-9 * c.statistic.max(1.0), "case {i}");
        assert!((got.p_value - c.p_value).abs() < TOLERANCE, "case {i}: p {} vs {}", got.p_value, c.p_value);
    }
}
