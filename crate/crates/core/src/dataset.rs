// SPDX-License-Identifier: Apache-2.0

//! Attribute schema, the immutable point set, and per-column standardization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Continuous,
    Discrete,
}

/// A named unit of exploration bias. Continuous groups may span several raw
/// columns (latitude + longitude → location).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeGroup {
    pub name: String,
    pub kind: AttributeKind,
    pub columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl AttributeGroup {
    pub fn continuous(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            kind: AttributeKind::Continuous,
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            categories: Vec::new(),
        }
    }

    pub fn discrete(name: &str, column: &str, categories: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            kind: AttributeKind::Discrete,
            columns: vec![column.to_owned()],
            categories: categories.iter().map(|c| (*c).to_owned()).collect(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.kind == AttributeKind::Continuous
    }
}

/// Point identifiers are strings on the wire; bare JSON numbers are accepted
/// and kept in their textual form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "RawId", into = "String")]
pub struct PointId(pub String);

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Text(String),
    Int(i64),
    Float(f64),
}

impl From<RawId> for PointId {
    fn from(raw: RawId) -> Self {
        match raw {
            RawId::Text(s) => PointId(s),
            RawId::Int(i) => PointId(i.to_string()),
            RawId::Float(f) => PointId(f.to_string()),
        }
    }
}

impl From<PointId> for String {
    fn from(id: PointId) -> Self {
        id.0
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_owned())
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub id: PointId,
    pub values: BTreeMap<String, CellValue>,
}

/// On-disk / on-wire form of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDocument {
    pub schema: Vec<AttributeGroup>,
    pub points: Vec<DataPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStandardization {
    pub column: String,
    pub mean: f64,
    pub std_dev: f64,
}

impl ColumnStandardization {
    #[inline]
    pub fn standardize(&self, v: f64) -> f64 {
        (v - self.mean) / self.std_dev
    }

    #[inline]
    pub fn destandardize(&self, z: f64) -> f64 {
        z * self.std_dev + self.mean
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("empty dataset")]
    Empty,
    #[error("schema has no attribute groups")]
    EmptySchema,
    #[error("duplicate attribute group name `{0}`")]
    DuplicateGroup(String),
    #[error("column `{0}` appears in more than one attribute group")]
    DuplicateColumn(String),
    #[error("attribute group `{group}`: {reason}")]
    InvalidGroup { group: String, reason: String },
    #[error("row {row}: duplicate point id `{id}`")]
    DuplicateId { row: usize, id: String },
    #[error("row {row}: missing column `{column}`")]
    MissingColumn { row: usize, column: String },
    #[error("row {row}, column `{column}`: non-numeric continuous value {value}")]
    NonNumeric { row: usize, column: String, value: String },
    #[error("row {row}, column `{column}`: unknown category `{value}`")]
    UnknownCategory { row: usize, column: String, value: String },
}

/// Location of one continuous column inside the coordinate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousColumn {
    pub name: String,
    pub group: usize,
}

/// The fixed point set plus everything derived from it once at load time.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    schema: Vec<AttributeGroup>,
    points: Vec<DataPoint>,
    continuous_columns: Vec<ContinuousColumn>,
    discrete_groups: Vec<usize>,
    standardization: Vec<ColumnStandardization>,
    /// Row-major `|D| × continuous_columns`.
    raw: Vec<f64>,
    standardized: Vec<f64>,
    /// Row-major `|D| × discrete_groups`, category indices.
    categories: Vec<usize>,
    /// Per discrete group, number of points in each category.
    category_counts: Vec<Vec<usize>>,
    index: HashMap<PointId, usize>,
}

impl DatasetBundle {
    pub fn new(schema: Vec<AttributeGroup>, points: Vec<DataPoint>) -> Result<Self, DatasetError> {
        validate_schema(&schema)?;
        if points.is_empty() {
            return Err(DatasetError::Empty);
        }
        let continuous_columns: Vec<ContinuousColumn> = schema
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_continuous())
            .flat_map(|(gi, g)| g.columns.iter().map(move |c| ContinuousColumn { name: c.clone(), group: gi }))
            .collect();
        let discrete_groups: Vec<usize> =
            schema.iter().enumerate().filter(|(_, g)| !g.is_continuous()).map(|(i, _)| i).collect();

        let n = points.len();
        let c = continuous_columns.len();
        let mut raw = Vec::with_capacity(n * c);
        let mut categories = Vec::with_capacity(n * discrete_groups.len());
        let mut category_counts: Vec<Vec<usize>> =
            discrete_groups.iter().map(|&g| vec![0; schema[g].categories.len()]).collect();
        let mut index = HashMap::with_capacity(n);

        for (row, point) in points.iter().enumerate() {
            if index.insert(point.id.clone(), row).is_some() {
                return Err(DatasetError::DuplicateId { row, id: point.id.0.clone() });
            }
            for col in &continuous_columns {
                let v = match point.values.get(&col.name) {
                    None => return Err(DatasetError::MissingColumn { row, column: col.name.clone() }),
                    Some(CellValue::Number(v)) if v.is_finite() => *v,
                    Some(other) => {
                        return Err(DatasetError::NonNumeric { row, column: col.name.clone(), value: cell_text(other) })
                    }
                };
                raw.push(v);
            }
            for (di, &g) in discrete_groups.iter().enumerate() {
                let group = &schema[g];
                let column = &group.columns[0];
                let cell = point
                    .values
                    .get(column)
                    .ok_or_else(|| DatasetError::MissingColumn { row, column: column.clone() })?;
                let text = cell_text(cell);
                let k = group.categories.iter().position(|c| *c == text).ok_or_else(|| {
                    DatasetError::UnknownCategory { row, column: column.clone(), value: text.clone() }
                })?;
                categories.push(k);
                category_counts[di][k] += 1;
            }
        }

        let standardization: Vec<ColumnStandardization> = continuous_columns
            .iter()
            .enumerate()
            .map(|(j, col)| {
                let mean = (0..n).map(|i| raw[i * c + j]).sum::<f64>() / n as f64;
                let var = (0..n).map(|i| (raw[i * c + j] - mean).powi(2)).sum::<f64>() / n as f64;
                let mut std_dev = var.sqrt();
                if !(std_dev > 0.0) {
                    log::warn!("column `{}` has zero variance; standardizing with divisor 1", col.name);
                    std_dev = 1.0;
                }
                ColumnStandardization { column: col.name.clone(), mean, std_dev }
            })
            .collect();
        let standardized =
            raw.iter().enumerate().map(|(idx, v)| standardization[idx % c.max(1)].standardize(*v)).collect();

        Ok(Self {
            schema,
            points,
            continuous_columns,
            discrete_groups,
            standardization,
            raw,
            standardized,
            categories,
            category_counts,
            index,
        })
    }

    pub fn from_document(doc: DatasetDocument) -> Result<Self, DatasetError> {
        Self::new(doc.schema, doc.points)
    }

    pub fn to_document(&self) -> DatasetDocument {
        DatasetDocument { schema: self.schema.clone(), points: self.points.clone() }
    }

    pub fn schema(&self) -> &[AttributeGroup] {
        &self.schema
    }

    /// Number of attribute groups, `d`.
    pub fn group_count(&self) -> usize {
        self.schema.len()
    }

    pub fn group_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|g| g.name == name)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn point_id(&self, idx: usize) -> &PointId {
        &self.points[idx].id
    }

    pub fn index_of(&self, id: &PointId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn continuous_columns(&self) -> &[ContinuousColumn] {
        &self.continuous_columns
    }

    /// Schema indices of the discrete groups, in schema order.
    pub fn discrete_groups(&self) -> &[usize] {
        &self.discrete_groups
    }

    pub fn standardization(&self) -> &[ColumnStandardization] {
        &self.standardization
    }

    /// Raw continuous values of one point, in coordinate order.
    pub fn raw_row(&self, idx: usize) -> &[f64] {
        let c = self.continuous_columns.len();
        &self.raw[idx * c..(idx + 1) * c]
    }

    pub fn standardized_row(&self, idx: usize) -> &[f64] {
        let c = self.continuous_columns.len();
        &self.standardized[idx * c..(idx + 1) * c]
    }

    /// Category index of point `idx` in the `di`-th discrete group.
    pub fn category(&self, idx: usize, di: usize) -> usize {
        self.categories[idx * self.discrete_groups.len() + di]
    }

    pub fn category_counts(&self, di: usize) -> &[usize] {
        &self.category_counts[di]
    }

    /// Coordinate indices (into the continuous vector) of a continuous group.
    pub fn group_columns(&self, group: usize) -> Vec<usize> {
        self.continuous_columns.iter().enumerate().filter(|(_, c)| c.group == group).map(|(i, _)| i).collect()
    }
}

fn cell_text(cell: &CellValue) -> String {
    match cell {
        CellValue::Text(s) => s.clone(),
        CellValue::Number(v) => v.to_string(),
    }
}

fn validate_schema(schema: &[AttributeGroup]) -> Result<(), DatasetError> {
    if schema.is_empty() {
        return Err(DatasetError::EmptySchema);
    }
    let mut names = HashSet::new();
    let mut columns = HashSet::new();
    for group in schema {
        if !names.insert(group.name.as_str()) {
            return Err(DatasetError::DuplicateGroup(group.name.clone()));
        }
        let invalid =
            |reason: &str| DatasetError::InvalidGroup { group: group.name.clone(), reason: reason.to_owned() };
        match group.kind {
            AttributeKind::Continuous => {
                if group.columns.is_empty() {
                    return Err(invalid("continuous groups need at least one column"));
                }
                if !group.categories.is_empty() {
                    return Err(invalid("continuous groups take no categories"));
                }
            }
            AttributeKind::Discrete => {
                if group.columns.len() != 1 {
                    return Err(invalid("discrete groups span exactly one column"));
                }
                if group.categories.len() < 2 {
                    return Err(invalid("discrete groups need at least two categories"));
                }
                let distinct: HashSet<&String> = group.categories.iter().collect();
                if distinct.len() != group.categories.len() {
                    return Err(invalid("duplicate category"));
                }
            }
        }
        for c in &group.columns {
            if !columns.insert(c.as_str()) {
                return Err(DatasetError::DuplicateColumn(c.clone()));
            }
        }
    }
    Ok(())
}
