// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use explorebias_core::eval::{crime_like_dataset, ks_two_sample};
use explorebias_core::{
    predict_next, AttributeGroup, CellValue, DataPoint, DatasetBundle, EventKind, InteractionEvent, Session,
    SessionConfig,
};

const COLOURS: [&str; 3] = ["red", "green", "blue"];
const SHAPES: [&str; 4] = ["circle", "square", "star", "cross"];
const DAYS: [&str; 7] = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"];

/// Seven groups (128 models), values from a fixed multiplicative hash.
fn seven_groups(n: usize) -> DatasetBundle {
    let u = |i: usize, salt: u64| {
        let h = (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15 ^ salt).rotate_left(17);
        (h >> 11) as f64 / (1u64 << 53) as f64
    };
    let points = (0..n)
        .map(|i| DataPoint {
            id: format!("p{i}").as_str().into(),
            values: BTreeMap::from([
                ("x".to_owned(), CellValue::Number(u(i, 1))),
                ("y".to_owned(), CellValue::Number(u(i, 2))),
                ("hour".to_owned(), CellValue::Number(24.0 * u(i, 3))),
                ("size".to_owned(), CellValue::Number(u(i, 4))),
                ("colour".to_owned(), CellValue::Text(COLOURS[i % 3].to_owned())),
                ("day".to_owned(), CellValue::Text(DAYS[i % 7].to_owned())),
                ("odd".to_owned(), CellValue::Text(if i % 2 == 0 { "no" } else { "yes" }.to_owned())),
                ("shape".to_owned(), CellValue::Text(SHAPES[(i / 3) % 4].to_owned())),
            ]),
        })
        .collect();
    DatasetBundle::new(
        vec![
            AttributeGroup::continuous("location", &["x", "y"]),
            AttributeGroup::continuous("hour", &["hour"]),
            AttributeGroup::continuous("size", &["size"]),
            AttributeGroup::discrete("colour", "colour", &COLOURS),
            AttributeGroup::discrete("day", "day", &DAYS),
            AttributeGroup::discrete("odd", "odd", &["no", "yes"]),
            AttributeGroup::discrete("shape", "shape", &SHAPES),
        ],
        points,
    )
    .expect("bench dataset is valid")
}

fn warmed(dataset: &Arc<DatasetBundle>, clicks: usize) -> Session {
    let mut s = Session::new(Arc::clone(dataset), SessionConfig::default()).expect("session");
    for t in 1..=clicks {
        let point_id = dataset.point_id((t * 37) % dataset.len()).clone();
        s.observe(InteractionEvent { point_id, timestep: t, kind: EventKind::Click, dwell_ms: None }).expect("observe");
    }
    s
}

fn bench(c: &mut Criterion) {
    for (name, dataset) in
        [("crime_4_models", crime_like_dataset(1951, 1951)), ("seven_groups_128_models", seven_groups(1951))]
    {
        let dataset = Arc::new(dataset);
        let base = warmed(&dataset, 10);
        let next = dataset.point_id(5).clone();
        c.bench_function(&format!("observe/{name}"), |b| {
            b.iter_batched(
                || base.clone(),
                |mut s| {
                    s.observe(InteractionEvent {
                        point_id: next.clone(),
                        timestep: 11,
                        kind: EventKind::Click,
                        dwell_ms: None,
                    })
                    .unwrap();
                    s
                },
                BatchSize::SmallInput,
            )
        });
        c.bench_function(&format!("predict_k50/{name}"), |b| {
            b.iter(|| predict_next(black_box(&base), 50, true).unwrap())
        });
    }

    let a: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.618).fract()).collect();
    let b2: Vec<f64> = (0..1951).map(|i| (i as f64 * 0.414).fract().powi(2)).collect();
    c.bench_function("ks_two_sample/1000x1951", |b| b.iter(|| ks_two_sample(black_box(&a), black_box(&b2)).unwrap()));
}

criterion_group!(benches, bench);
criterion_main!(benches);
