// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic sessions with known ground-truth bias.
//!
//! Strategy strings are `;`-separated clauses:
//!
//! ```text
//! groups=location,type;focus:location=0.5,0.5,r0.2;category:type=Assault;clicks=20;seed=7
//! ```
//!
//! `focus:<group>=random,r<radius>` centres each session on a random dataset
//! point and `category:<group>=random` draws the target in proportion to the
//! dataset. `groups=` with no names (or `none`) is the unbiased strategy.
//! Focus centres and radii are in raw attribute units.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeGroup, CellValue, DataPoint, DatasetBundle};
use crate::ingest::{RawEvent, SessionLog};

use super::EvalError;

/// Random resolutions are redrawn until at least this many points qualify.
const MIN_RANDOM_CANDIDATES: usize = 5;
const MAX_RESOLVE_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Focus {
    /// `None` draws a dataset point per session.
    pub center: Option<Vec<f64>>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Fixed(String),
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStrategy {
    pub biased_groups: Vec<String>,
    pub focus: BTreeMap<String, Focus>,
    pub target_category: BTreeMap<String, Target>,
    pub click_count: usize,
    pub seed: u64,
}

impl Default for SyntheticStrategy {
    fn default() -> Self {
        Self {
            biased_groups: Vec::new(),
            focus: BTreeMap::new(),
            target_category: BTreeMap::new(),
            click_count: 20,
            seed: 0,
        }
    }
}

fn bad(msg: impl Into<String>) -> EvalError {
    EvalError::Strategy(msg.into())
}

impl FromStr for SyntheticStrategy {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = SyntheticStrategy::default();
        for clause in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            if clause == "none" || clause == "unbiased" {
                continue;
            }
            let (key, value) = clause.split_once('=').ok_or_else(|| bad(format!("clause `{clause}` lacks `=`")))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(group) = key.strip_prefix("focus:") {
                out.focus.insert(group.to_owned(), parse_focus(value)?);
            } else if let Some(group) = key.strip_prefix("category:") {
                let target = if value == "random" { Target::Random } else { Target::Fixed(value.to_owned()) };
                out.target_category.insert(group.to_owned(), target);
            } else {
                match key {
                    "groups" => {
                        out.biased_groups =
                            value.split(',').map(str::trim).filter(|g| !g.is_empty()).map(str::to_owned).collect()
                    }
                    "clicks" => {
                        out.click_count = value.parse().map_err(|_| bad(format!("bad click count `{value}`")))?
                    }
                    "seed" => out.seed = value.parse().map_err(|_| bad(format!("bad seed `{value}`")))?,
                    _ => return Err(bad(format!("unknown clause `{key}`"))),
                }
            }
        }
        Ok(out)
    }
}

fn parse_focus(value: &str) -> Result<Focus, EvalError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let (radius, coords) = parts.split_last().ok_or_else(|| bad("empty focus"))?;
    let radius: f64 = radius
        .strip_prefix('r')
        .and_then(|r| r.parse().ok())
        .ok_or_else(|| bad(format!("focus `{value}` must end with r<radius>")))?;
    let center = if coords == ["random"] {
        None
    } else {
        let c = coords.iter().map(|c| c.parse::<f64>()).collect::<Result<Vec<_>, _>>();
        Some(c.map_err(|_| bad(format!("bad focus centre in `{value}`")))?)
    };
    Ok(Focus { center, radius })
}

impl fmt::Display for SyntheticStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "groups={}", self.biased_groups.join(","))?;
        for (g, focus) in &self.focus {
            let centre = match &focus.center {
                Some(c) => c.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
                None => "random".into(),
            };
            write!(f, ";focus:{g}={centre},r{}", focus.radius)?;
        }
        for (g, t) in &self.target_category {
            let t = match t {
                Target::Fixed(c) => c.as_str(),
                Target::Random => "random",
            };
            write!(f, ";category:{g}={t}")?;
        }
        write!(f, ";clicks={};seed={}", self.click_count, self.seed)
    }
}

/// One session's concrete constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedStrategy {
    pub focus: BTreeMap<String, (Vec<f64>, f64)>,
    pub category: BTreeMap<String, String>,
}

impl ResolvedStrategy {
    pub fn satisfies(&self, dataset: &DatasetBundle, point: usize) -> bool {
        let row = dataset.raw_row(point);
        let in_focus = self.focus.iter().all(|(g, (centre, radius))| {
            let cols = dataset.group_columns(dataset.group_index(g).expect("validated group"));
            let d2: f64 = cols.iter().zip(centre).map(|(&c, x)| (row[c] - x).powi(2)).sum();
            d2.sqrt() <= radius + 1e-12
        });
        in_focus
            && self.category.iter().all(|(g, cat)| {
                let gi = dataset.group_index(g).expect("validated group");
                let di = dataset.discrete_groups().iter().position(|&x| x == gi).expect("discrete group");
                dataset.schema()[gi].categories[dataset.category(point, di)] == *cat
            })
    }

    pub fn candidates(&self, dataset: &DatasetBundle) -> Vec<usize> {
        (0..dataset.len()).filter(|&i| self.satisfies(dataset, i)).collect()
    }
}

impl SyntheticStrategy {
    pub fn is_unbiased(&self) -> bool {
        self.biased_groups.is_empty()
    }

    pub fn validate(&self, dataset: &DatasetBundle) -> Result<(), EvalError> {
        for (i, g) in self.biased_groups.iter().enumerate() {
            if self.biased_groups[..i].contains(g) {
                return Err(bad(format!("group `{g}` listed twice")));
            }
            let gi = dataset.group_index(g).ok_or_else(|| EvalError::UnknownGroup(g.clone()))?;
            let group = &dataset.schema()[gi];
            if group.is_continuous() {
                let focus = self.focus.get(g).ok_or_else(|| bad(format!("continuous group `{g}` needs a focus")))?;
                if !(focus.radius >= 0.0) {
                    return Err(bad(format!("focus radius for `{g}` must be non-negative")));
                }
                if let Some(c) = &focus.center {
                    if c.len() != group.columns.len() {
                        return Err(bad(format!("focus for `{g}` needs {} coordinates", group.columns.len())));
                    }
                }
            } else if let Some(Target::Fixed(c)) = self.target_category.get(g) {
                if !group.categories.contains(c) {
                    return Err(bad(format!("`{c}` is not a category of `{g}`")));
                }
            }
        }
        for g in self.focus.keys().chain(self.target_category.keys()) {
            if !self.biased_groups.contains(g) {
                return Err(bad(format!("constraint on `{g}`, which is not a biased group")));
            }
        }
        for g in self.focus.keys() {
            if !dataset.schema()[dataset.group_index(g).expect("checked")].is_continuous() {
                return Err(bad(format!("focus given for discrete group `{g}`")));
            }
        }
        for g in self.target_category.keys() {
            if dataset.schema()[dataset.group_index(g).expect("checked")].is_continuous() {
                return Err(bad(format!("category given for continuous group `{g}`")));
            }
        }
        Ok(())
    }

    fn has_random_parts(&self) -> bool {
        self.biased_groups.iter().any(|g| {
            self.focus.get(g).is_some_and(|f| f.center.is_none())
                || (!self.focus.contains_key(g) && !matches!(self.target_category.get(g), Some(Target::Fixed(_))))
        })
    }

    fn draw(&self, dataset: &DatasetBundle, rng: &mut impl Rng) -> ResolvedStrategy {
        let mut resolved = ResolvedStrategy { focus: BTreeMap::new(), category: BTreeMap::new() };
        for g in &self.biased_groups {
            let gi = dataset.group_index(g).expect("validated group");
            let group = &dataset.schema()[gi];
            if group.is_continuous() {
                let focus = &self.focus[g];
                let centre = focus.center.clone().unwrap_or_else(|| {
                    let row = dataset.raw_row(rng.random_range(0..dataset.len()));
                    dataset.group_columns(gi).iter().map(|&c| row[c]).collect()
                });
                resolved.focus.insert(g.clone(), (centre, focus.radius));
            } else {
                let cat = match self.target_category.get(g) {
                    Some(Target::Fixed(c)) => c.clone(),
                    _ => {
                        let di = dataset.discrete_groups().iter().position(|&x| x == gi).expect("discrete group");
                        let weights = WeightedIndex::new(dataset.category_counts(di)).expect("dataset is non-empty");
                        group.categories[weights.sample(rng)].clone()
                    }
                };
                resolved.category.insert(g.clone(), cat);
            }
        }
        resolved
    }

    /// Concrete constraints and their candidate set for one session.
    pub fn resolve(
        &self,
        dataset: &DatasetBundle,
        rng: &mut impl Rng,
    ) -> Result<(ResolvedStrategy, Vec<usize>), EvalError> {
        self.validate(dataset)?;
        if !self.has_random_parts() {
            let resolved = self.draw(dataset, rng);
            let candidates = resolved.candidates(dataset);
            if candidates.is_empty() {
                return Err(EvalError::EmptyConstraintSet);
            }
            return Ok((resolved, candidates));
        }
        for _ in 0..MAX_RESOLVE_ATTEMPTS {
            let resolved = self.draw(dataset, rng);
            let candidates = resolved.candidates(dataset);
            if candidates.len() >= MIN_RANDOM_CANDIDATES.min(dataset.len()) {
                return Ok((resolved, candidates));
            }
        }
        Err(EvalError::EmptyConstraintSet)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSession {
    pub log: SessionLog,
    pub resolved: ResolvedStrategy,
    pub candidate_count: usize,
}

fn session_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn generate_indexed(
    dataset: &DatasetBundle,
    strategy: &SyntheticStrategy,
    index: usize,
) -> Result<SyntheticSession, EvalError> {
    let mut rng = session_rng(strategy.seed, index as u64);
    let (resolved, candidates) = strategy.resolve(dataset, &mut rng)?;
    let events = (0..strategy.click_count)
        .map(|_| RawEvent::click(dataset.point_id(candidates[rng.random_range(0..candidates.len())]).clone()))
        .collect();
    let log = SessionLog {
        session_id: format!("synthetic-{index:04}"),
        events,
        provenance: Some(format!("synthetic {strategy}")),
    };
    Ok(SyntheticSession { log, resolved, candidate_count: candidates.len() })
}

/// Clicks drawn uniformly, with replacement, from the points satisfying
/// every biased-group constraint.
pub fn generate_session(dataset: &DatasetBundle, strategy: &SyntheticStrategy) -> Result<SessionLog, EvalError> {
    generate_indexed(dataset, strategy, 0).map(|s| s.log)
}

/// `sessions` independent sessions; session `i` uses ChaCha stream `i` of
/// the strategy seed.
pub fn generate_batch(
    dataset: &DatasetBundle,
    strategy: &SyntheticStrategy,
    sessions: usize,
) -> Result<Vec<SyntheticSession>, EvalError> {
    (0..sessions).map(|i| generate_indexed(dataset, strategy, i)).collect()
}

pub const CRIME_CATEGORIES: [&str; 8] =
    ["theft", "battery", "criminal_damage", "narcotics", "assault", "burglary", "robbery", "homicide"];
pub const CRIME_PROPORTIONS: [f64; 8] = [0.30, 0.18, 0.14, 0.12, 0.10, 0.08, 0.05, 0.03];

/// A crime-map-shaped dataset: five spatial hot spots plus a uniform
/// background on the unit square, and eight skewed offence types.
/// Groups: `location` (x, y) and `type`.
pub fn crime_like_dataset(n: usize, seed: u64) -> DatasetBundle {
    const CENTRES: [[f64; 2]; 5] = [[0.3, 0.3], [0.7, 0.6], [0.5, 0.8], [0.2, 0.7], [0.8, 0.2]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, 0.07).expect("valid sd");
    let types = WeightedIndex::new(CRIME_PROPORTIONS).expect("valid weights");
    let points = (0..n)
        .map(|i| {
            let cluster = rng.random_range(0..6);
            let (x, y) = if cluster < CENTRES.len() {
                let [cx, cy] = CENTRES[cluster];
                (cx + jitter.sample(&mut rng), cy + jitter.sample(&mut rng))
            } else {
                (rng.random::<f64>(), rng.random::<f64>())
            };
            let kind = CRIME_CATEGORIES[types.sample(&mut rng)];
            DataPoint {
                id: format!("c{i:05}").as_str().into(),
                values: BTreeMap::from([
                    ("x".to_owned(), CellValue::Number(x)),
                    ("y".to_owned(), CellValue::Number(y)),
                    ("type".to_owned(), CellValue::Text(kind.to_owned())),
                ]),
            }
        })
        .collect();
    let schema = vec![
        AttributeGroup::continuous("location", &["x", "y"]),
        AttributeGroup::discrete("type", "type", &CRIME_CATEGORIES),
    ];
    DatasetBundle::new(schema, points).expect("generated dataset is valid")
}
