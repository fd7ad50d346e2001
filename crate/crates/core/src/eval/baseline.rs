// SPDX-License-Identifier: Apache-2.0

//! The attribute-distribution baseline `b_Ad(a) = 1 - p_a`: KS against the
//! full column for continuous groups, χ² against the full category
//! proportions for discrete ones.

use crate::dataset::DatasetBundle;

use super::hypothesis::{chi_square_gof, ks_sorted};
use super::EvalError;

/// Per-dataset reference distributions, reused across many scorings.
#[derive(Debug, Clone)]
pub struct BaselineScorer {
    /// Sorted raw values of each continuous coordinate.
    columns: Vec<Vec<f64>>,
    /// Per discrete ordinal: categories present in the dataset and their
    /// proportions.
    proportions: Vec<(Vec<usize>, Vec<f64>)>,
}

impl BaselineScorer {
    pub fn new(dataset: &DatasetBundle) -> Self {
        let columns = (0..dataset.continuous_columns().len())
            .map(|c| {
                let mut v: Vec<f64> = (0..dataset.len()).map(|i| dataset.raw_row(i)[c]).collect();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        let n = dataset.len() as f64;
        let proportions = (0..dataset.discrete_groups().len())
            .map(|di| {
                let counts = dataset.category_counts(di);
                let present: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] > 0).collect();
                let p = present.iter().map(|&k| counts[k] as f64 / n).collect();
                (present, p)
            })
            .collect();
        Self { columns, proportions }
    }

    /// `b_Ad` of one group given the dataset indices interacted with.
    pub fn score(&self, dataset: &DatasetBundle, interactions: &[usize], group: usize) -> Result<f64, EvalError> {
        if interactions.is_empty() {
            return Err(EvalError::NoInteractions);
        }
        if dataset.schema()[group].is_continuous() {
            let mut score = 1.0;
            for c in dataset.group_columns(group) {
                let mut sample: Vec<f64> = interactions.iter().map(|&i| dataset.raw_row(i)[c]).collect();
                sample.sort_by(f64::total_cmp);
                score *= 1.0 - ks_sorted(&sample, &self.columns[c])?.p_value;
            }
            Ok(score)
        } else {
            let di = dataset.discrete_groups().iter().position(|&g| g == group).expect("discrete group has an ordinal");
            let (present, p) = &self.proportions[di];
            if present.len() < 2 {
                return Ok(0.0);
            }
            let mut observed = vec![0u64; present.len()];
            for &i in interactions {
                let k = dataset.category(i, di);
                let slot = present.binary_search(&k).expect("interacted category occurs in the dataset");
                observed[slot] += 1;
            }
            Ok(1.0 - chi_square_gof(&observed, p)?.p_value)
        }
    }
}

pub fn attribute_distribution_bias(
    dataset: &DatasetBundle,
    interactions: &[usize],
    group: &str,
) -> Result<f64, EvalError> {
    let g = dataset.group_index(group).ok_or_else(|| EvalError::UnknownGroup(group.to_owned()))?;
    BaselineScorer::new(dataset).score(dataset, interactions, g)
}

/// Bias toward several groups at once.
pub fn conjunction(scores: &[f64]) -> f64 {
    scores.iter().product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeGroup, CellValue, DataPoint};
    use std::collections::BTreeMap;

    fn grid(n: usize) -> DatasetBundle {
        let cats = ["a", "b", "c", "d", "e"];
        let points = (0..n)
            .map(|i| DataPoint {
                id: format!("p{i}").as_str().into(),
                values: BTreeMap::from([
                    ("x".to_owned(), CellValue::Number(i as f64 / n as f64)),
                    ("k".to_owned(), CellValue::Text(cats[i % 5].to_owned())),
                ]),
            })
            .collect();
        DatasetBundle::new(
            vec![AttributeGroup::continuous("x", &["x"]), AttributeGroup::discrete("k", "k", &cats)],
            points,
        )
        .unwrap()
    }

    #[test]
    fn uniform_interactions_score_low() {
        let d = grid(500);
        let all: Vec<usize> = (0..500).step_by(2).collect();
        assert!(attribute_distribution_bias(&d, &all, "x").unwrap() < 0.05);
        let spread: Vec<usize> = (0..250).collect::<Vec<_>>().iter().map(|i| (i * 2 + i / 5) % 500).collect();
        assert!(attribute_distribution_bias(&d, &spread, "k").unwrap() < 0.5);
    }

    #[test]
    fn single_category_score_approaches_one() {
        let d = grid(500);
        let mut last = 0.0;
        for n in [3, 6, 12, 24, 48] {
            let picks: Vec<usize> = (0..n).map(|i| i * 5).collect();
            let s = attribute_distribution_bias(&d, &picks, "k").unwrap();
            assert!(s >= last);
            last = s;
        }
        assert!(last > 1.0 - 1e-12);
    }

    #[test]
    fn conjunction_is_product() {
        assert!((conjunction(&[0.9, 0.8]) - 0.72).abs() < 1e-15);
        assert_eq!(conjunction(&[]), 1.0);
    }

    #[test]
    fn errors() {
        let d = grid(10);
        assert_eq!(attribute_distribution_bias(&d, &[], "x"), Err(EvalError::NoInteractions));
        assert!(matches!(attribute_distribution_bias(&d, &[1], "zzz"), Err(EvalError::UnknownGroup(_))));
    }
}
