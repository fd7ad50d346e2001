// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::sync::Arc;

use explorebias_core::eval::{
    crime_like_dataset, generate_batch, generate_session, replay_and_score, EvalReport, ReplayConfig, SyntheticStrategy,
};
use explorebias_core::{
    parse_dataset, AttributeGroup, CellValue, DataPoint, DatasetBundle, PointId, RawEvent, SessionLog,
};

fn restaurants() -> DatasetBundle {
    parse_dataset(include_str!("../../../data/restaurants.json")).unwrap()
}

#[test]
fn type_strategy_only_clicks_mexican() {
    let d = restaurants();
    let s: SyntheticStrategy = "groups=type;category:type=Mexican;clicks=30;seed=7".parse().unwrap();
    let log = generate_session(&d, &s).unwrap();
    assert_eq!(log.len(), 30);
    for e in &log.events {
        assert!(["r2", "r5", "r7"].contains(&e.point_id.0.as_str()));
    }
}

#[test]
fn focus_strategy_respects_radius() {
    let d = restaurants();
    let s: SyntheticStrategy = "groups=location;focus:location=0.8,0.3,r0.1;clicks=40;seed=1".parse().unwrap();
    let log = generate_session(&d, &s).unwrap();
    let seen: std::collections::BTreeSet<&str> = log.events.iter().map(|e| e.point_id.0.as_str()).collect();
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), ["r2", "r4"]);
}

#[test]
fn unbiased_strategy_is_deterministic() {
    let d = restaurants();
    let s: SyntheticStrategy = "none;clicks=25;seed=99".parse().unwrap();
    assert_eq!(generate_session(&d, &s).unwrap(), generate_session(&d, &s).unwrap());
    let other = SyntheticStrategy { seed: 100, ..s.clone() };
    assert_ne!(generate_session(&d, &s).unwrap().events, generate_session(&d, &other).unwrap().events);
}

#[test]
fn two_point_toy() {
    let points = ["a", "b"]
        .iter()
        .enumerate()
        .map(|(i, id)| DataPoint {
            id: (*id).into(),
            values: BTreeMap::from([("v".to_owned(), CellValue::Number(i as f64))]),
        })
        .collect();
    let d = Arc::new(DatasetBundle::new(vec![AttributeGroup::continuous("v", &["v"])], points).unwrap());
    let log = SessionLog::new("toy", (0..10).map(|i| RawEvent::click(if i % 2 == 0 { "a" } else { "b" })).collect());
    let config = ReplayConfig { k_grid: vec![1, 2], ..ReplayConfig::default() };
    let report = replay_and_score(&d, &[log], &config).unwrap();
    let s = &report.sessions[0];
    assert_eq!(s.predictions_scored, 10 - 3);
    for step in &s.steps {
        if step.t >= 3 && step.t < 10 {
            assert_eq!(step.hits_including_visited.len(), 2);
            assert!(step.hits_including_visited[1]);
        } else {
            assert!(step.hits_including_visited.is_empty());
        }
    }
    let rates = s.hit_rate_including_visited.as_ref().unwrap();
    assert!((0.0..=1.0).contains(&rates[0]));
    assert_eq!(rates[1], 1.0);
}

#[test]
fn geo_batch_detects_location() {
    let d = Arc::new(crime_like_dataset(1951, 2024));
    let s: SyntheticStrategy = "groups=location;focus:location=random,r0.1;clicks=20;seed=3".parse().unwrap();
    let logs: Vec<SessionLog> = generate_batch(&d, &s, 100).unwrap().into_iter().map(|s| s.log).collect();
    let config =
        ReplayConfig { k_grid: vec![1, 5, 10, 50], truth: Some(vec!["location".into()]), ..ReplayConfig::default() };
    let report = replay_and_score(&d, &logs, &config).unwrap();
    let at20 = report.aggregate.bias[19][0].mean;
    assert!(at20 > 0.9, "{at20}");
    for s in &report.sessions {
        for rates in [&s.hit_rate_excluding_visited, &s.hit_rate_including_visited].into_iter().flatten() {
            assert!(rates.windows(2).all(|w| w[0] <= w[1]));
        }
    }
    assert_eq!(report.recompute_aggregate(), report.aggregate);

    let round: EvalReport = serde_json::from_str(&report.to_json()).unwrap();
    assert!(round.sessions == report.sessions, "JSON round trip changed the sessions");
    let tsv = report.to_tsv();
    assert!(tsv.starts_with("session_id\tt\tmetric\tkey\tvalue\n"));
    // 20 steps x (2 bias + 2 baseline + truth pair) plus 17 scored steps (t = 3..19) x 4 k x 2 modes
    assert_eq!(tsv.lines().count(), 1 + 100 * (20 * 6 + 17 * 8));
}

#[test]
fn unknown_point_in_log_is_an_error() {
    let d = Arc::new(restaurants());
    let log = SessionLog::new("bad", vec![RawEvent::click("r1"), RawEvent::click(PointId::from("nope"))]);
    assert!(replay_and_score(&d, &[log], &ReplayConfig::default()).is_err());
}
