use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{parse_yes_no, IngestError};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum AttributeKind {
    /// Questionnaire item, `0` or `1`.
    BinaryScore,
    /// yes/no flag.
    Boolean,
    /// Nominal attribute; values kept sorted and unique.
    Categorical(Vec<String>),
    Numeric,
    /// YES/NO target. Exactly one per schema.
    ClassLabel,
}

impl AttributeKind {
    pub fn categorical<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = values.into_iter().map(Into::into).collect();
        AttributeKind::Categorical(set.into_iter().collect())
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttributeKind::BinaryScore => "binary_score",
            AttributeKind::Boolean => "boolean",
            AttributeKind::Categorical(_) => "categorical",
            AttributeKind::Numeric => "numeric",
            AttributeKind::ClassLabel => "class_label",
        }
    }

    /// Reads one non-missing cell. `None` when the text is invalid for the kind.
    pub(crate) fn read(&self, raw: &str) -> Option<Value> {
        let t = raw.trim();
        match self {
            AttributeKind::BinaryScore => match t {
                "0" => Some(Value::Number(0.0)),
                "1" => Some(Value::Number(1.0)),
                _ => None,
            },
            AttributeKind::Boolean | AttributeKind::ClassLabel => parse_yes_no(t).map(Value::Flag),
            AttributeKind::Categorical(values) => values
                .binary_search_by(|v| v.as_str().cmp(t))
                .ok()
                .map(|_| Value::Category(t.to_string())),
            AttributeKind::Numeric => t
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Value::Number),
        }
    }

    fn accepts(&self, value: &Value) -> bool {
        match (self, value) {
            (AttributeKind::BinaryScore, Value::Number(v)) => *v == 0.0 || *v == 1.0,
            (AttributeKind::Numeric, Value::Number(v)) => v.is_finite(),
            (AttributeKind::Boolean | AttributeKind::ClassLabel, Value::Flag(_)) => true,
            (AttributeKind::Categorical(values), Value::Category(c)) => {
                values.binary_search(c).is_ok()
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Number(f64),
    Flag(bool),
    Category(String),
}

/// A cell is a value or missing.
pub type Cell = Option<Value>;

/// Parsed, schema-tagged rows before encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    relation: String,
    schema: Vec<AttributeSpec>,
    rows: Vec<Vec<Cell>>,
}

impl RawTable {
    /// Checks the schema and every row against it.
    pub fn new(
        relation: impl Into<String>,
        schema: Vec<AttributeSpec>,
        rows: Vec<Vec<Cell>>,
    ) -> Result<Self, IngestError> {
        validate_schema(&schema)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(IngestError::Arity {
                    line: r + 1,
                    expected: schema.len(),
                    found: row.len(),
                });
            }
            for (attr, cell) in schema.iter().zip(row) {
                if let Some(v) = cell {
                    if !attr.kind.accepts(v) {
                        return Err(IngestError::InvalidCell {
                            line: r + 1,
                            attribute: attr.name.clone(),
                            value: format!("{v:?}"),
                        });
                    }
                }
            }
        }
        Ok(Self {
            relation: relation.into(),
            schema,
            rows,
        })
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn schema(&self) -> &[AttributeSpec] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|a| a.name == name)
    }

    pub fn class_index(&self) -> usize {
        self.schema
            .iter()
            .position(|a| a.kind == AttributeKind::ClassLabel)
            .expect("schema validated to carry a class attribute")
    }

    /// Missing-cell count per attribute, in schema order.
    pub fn missing_census(&self) -> Vec<(String, usize)> {
        self.schema
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let n = self.rows.iter().filter(|r| r[j].is_none()).count();
                (a.name.clone(), n)
            })
            .collect()
    }
}

fn validate_schema(schema: &[AttributeSpec]) -> Result<(), IngestError> {
    let mut seen = HashSet::new();
    for a in schema {
        if !seen.insert(a.name.as_str()) {
            return Err(IngestError::InvalidSchema(format!(
                "duplicate attribute `{}`",
                a.name
            )));
        }
        if let AttributeKind::Categorical(values) = &a.kind {
            if values.is_empty() {
                return Err(IngestError::InvalidSchema(format!(
                    "categorical attribute `{}` has no values",
                    a.name
                )));
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(IngestError::InvalidSchema(format!(
                    "values of `{}` must be sorted and unique",
                    a.name
                )));
            }
        }
    }
    let classes = schema
        .iter()
        .filter(|a| a.kind == AttributeKind::ClassLabel)
        .count();
    if classes != 1 {
        return Err(IngestError::InvalidSchema(format!(
            "expected exactly one class attribute, found {classes}"
        )));
    }
    Ok(())
}

/// Concatenates tables whose schemas name the same attributes.
///
/// Columns are re-aligned by name to the first table's order and categorical
/// value sets are unioned.
pub fn merge_tables(tables: &[RawTable]) -> Result<RawTable, IngestError> {
    let Some(first) = tables.first() else {
        return Err(IngestError::InvalidSchema("no tables to merge".into()));
    };
    let mut schema = first.schema.clone();
    let names: BTreeSet<&str> = first.schema.iter().map(|a| a.name.as_str()).collect();

    // column maps from each table into the merged order
    let mut maps = Vec::with_capacity(tables.len());
    for t in tables {
        let theirs: BTreeSet<&str> = t.schema.iter().map(|a| a.name.as_str()).collect();
        if theirs != names {
            return Err(IngestError::SchemaMismatch {
                missing: names.difference(&theirs).map(|s| s.to_string()).collect(),
                unexpected: theirs.difference(&names).map(|s| s.to_string()).collect(),
            });
        }
        let positions: BTreeMap<&str, usize> = t
            .schema
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.as_str(), i))
            .collect();
        let map: Vec<usize> = first
            .schema
            .iter()
            .map(|a| positions[a.name.as_str()])
            .collect();
        for (merged, &src) in schema.iter_mut().zip(&map) {
            merged.kind = union_kind(&merged.name, &merged.kind, &t.schema[src].kind)?;
        }
        maps.push(map);
    }

    let mut rows = Vec::with_capacity(tables.iter().map(RawTable::len).sum());
    for (t, map) in tables.iter().zip(&maps) {
        for row in &t.rows {
            rows.push(map.iter().map(|&src| row[src].clone()).collect());
        }
    }
    RawTable::new(first.relation.clone(), schema, rows)
}

fn union_kind(
    name: &str,
    a: &AttributeKind,
    b: &AttributeKind,
) -> Result<AttributeKind, IngestError> {
    match (a, b) {
        (AttributeKind::Categorical(x), AttributeKind::Categorical(y)) => {
            Ok(AttributeKind::categorical(x.iter().chain(y).cloned()))
        }
        _ if a == b => Ok(a.clone()),
        _ => Err(IngestError::IncompatibleKinds(name.to_string())),
    }
}

/// Keeps only complete rows, in order. Returns the table and the number
/// of rows removed.
pub fn drop_missing(table: &RawTable) -> (RawTable, usize) {
    let rows: Vec<Vec<Cell>> = table
        .rows
        .iter()
        .filter(|r| r.iter().all(Option::is_some))
        .cloned()
        .collect();
    let dropped = table.rows.len() - rows.len();
    (
        RawTable {
            relation: table.relation.clone(),
            schema: table.schema.clone(),
            rows,
        },
        dropped,
    )
}

/// Dense features with binary labels (1 = YES).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self, IngestError> {
        if features.rows() != labels.len() {
            return Err(IngestError::InvalidSchema(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if features.cols() != feature_names.len() {
            return Err(IngestError::DimensionMismatch {
                expected: feature_names.len(),
                got: features.cols(),
            });
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(IngestError::InvalidSchema("labels must be 0 or 1".into()));
        }
        if !features.is_finite() {
            return Err(IngestError::InvalidSchema(
                "feature matrix has non-finite entries".into(),
            ));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let p = self.positives();
        p > 0 && p < self.len()
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}
