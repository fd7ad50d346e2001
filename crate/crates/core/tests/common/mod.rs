// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

pub mod oracle;
pub mod quadrature;

use std::collections::BTreeMap;

use explorebias_core::{AttributeGroup, CellValue, DataPoint, DatasetBundle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const COLOURS: [&str; 3] = ["red", "green", "blue"];
pub const SHAPES: [&str; 4] = ["circle", "square", "star", "cross"];

/// Four groups: a 2-D continuous, a 1-D continuous and two discrete.
pub fn mixed_dataset(n: usize, seed: u64) -> DatasetBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|i| DataPoint {
            id: format!("p{i:03}").as_str().into(),
            values: BTreeMap::from([
                ("x".to_owned(), CellValue::Number(rng.random::<f64>())),
                ("y".to_owned(), CellValue::Number(rng.random::<f64>() * 10.0)),
                ("size".to_owned(), CellValue::Number(rng.random_range(-3.0..3.0))),
                ("colour".to_owned(), CellValue::Text(COLOURS[rng.random_range(0..3)].to_owned())),
                ("shape".to_owned(), CellValue::Text(SHAPES[rng.random_range(0..4)].to_owned())),
            ]),
        })
        .collect();
    DatasetBundle::new(
        vec![
            AttributeGroup::continuous("location", &["x", "y"]),
            AttributeGroup::discrete("colour", "colour", &COLOURS),
            AttributeGroup::continuous("size", &["size"]),
            AttributeGroup::discrete("shape", "shape", &SHAPES),
        ],
        points,
    )
    .unwrap()
}

pub const DISTRICTS: [&str; 10] = ["d0", "d1", "d2", "d3", "d4", "d5", "d6", "d7", "d8", "d9"];
pub const WEEKDAYS: [&str; 7] = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"];

/// Seven groups (three continuous spanning four columns, four discrete),
/// so `2^7 = 128` models.
pub fn seven_group_dataset(n: usize, seed: u64) -> DatasetBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|i| DataPoint {
            id: format!("q{i:05}").as_str().into(),
            values: BTreeMap::from([
                ("x".to_owned(), CellValue::Number(rng.random::<f64>())),
                ("y".to_owned(), CellValue::Number(rng.random::<f64>())),
                ("hour".to_owned(), CellValue::Number(rng.random_range(0.0..24.0))),
                ("severity".to_owned(), CellValue::Number(rng.random_range(1.0..5.0))),
                ("colour".to_owned(), CellValue::Text(COLOURS[rng.random_range(0..3)].to_owned())),
                ("shape".to_owned(), CellValue::Text(SHAPES[rng.random_range(0..4)].to_owned())),
                ("district".to_owned(), CellValue::Text(DISTRICTS[rng.random_range(0..10)].to_owned())),
                ("weekday".to_owned(), CellValue::Text(WEEKDAYS[rng.random_range(0..7)].to_owned())),
            ]),
        })
        .collect();
    DatasetBundle::new(
        vec![
            AttributeGroup::continuous("location", &["x", "y"]),
            AttributeGroup::continuous("hour", &["hour"]),
            AttributeGroup::continuous("severity", &["severity"]),
            AttributeGroup::discrete("colour", "colour", &COLOURS),
            AttributeGroup::discrete("shape", "shape", &SHAPES),
            AttributeGroup::discrete("district", "district", &DISTRICTS),
            AttributeGroup::discrete("weekday", "weekday", &WEEKDAYS),
        ],
        points,
    )
    .unwrap()
}
