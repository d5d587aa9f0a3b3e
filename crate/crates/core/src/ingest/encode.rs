use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::table::{AttributeKind, Dataset, RawTable, Value};
use super::IngestError;
use crate::matrix::Matrix;

/// Attributes left out of the feature matrix by default: `result` is the
/// AQ-10 sum the label is derived from, `age_desc` only restates the age band.
pub const DEFAULT_EXCLUDED: [&str; 2] = ["result", "age_desc"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeOptions {
    /// Attribute names dropped before encoding. Names absent from the table
    /// are ignored.
    pub exclude: Vec<String>,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            exclude: DEFAULT_EXCLUDED.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Column {
    Pass { source: usize },
    Flag { source: usize },
    OneHot { source: usize, values: Vec<String> },
}

/// Column plan fitted on one table and replayable on others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    columns: Vec<Column>,
    attribute_names: Vec<String>,
    feature_names: Vec<String>,
    class_source: usize,
    excluded: Vec<String>,
}

impl Encoder {
    /// Plans the feature layout. Categorical attributes get one indicator per
    /// value observed in `table`, in sorted order.
    pub fn fit(table: &RawTable, options: &EncodeOptions) -> Self {
        let schema = table.schema();
        let mut columns = Vec::new();
        let mut feature_names = Vec::new();
        let mut excluded = Vec::new();
        for (j, attr) in schema.iter().enumerate() {
            if options.exclude.iter().any(|e| *e == attr.name) {
                excluded.push(attr.name.clone());
                continue;
            }
            match &attr.kind {
                AttributeKind::ClassLabel => {}
                AttributeKind::BinaryScore | AttributeKind::Numeric => {
                    columns.push(Column::Pass { source: j });
                    feature_names.push(attr.name.clone());
                }
                AttributeKind::Boolean => {
                    columns.push(Column::Flag { source: j });
                    feature_names.push(attr.name.clone());
                }
                AttributeKind::Categorical(_) => {
                    let observed: BTreeSet<&str> = table
                        .rows()
                        .iter()
                        .filter_map(|r| match &r[j] {
                            Some(Value::Category(c)) => Some(c.as_str()),
                            _ => None,
                        })
                        .collect();
                    let values: Vec<String> = observed.into_iter().map(str::to_string).collect();
                    for v in &values {
                        feature_names.push(format!("{}={}", attr.name, v));
                    }
                    columns.push(Column::OneHot { source: j, values });
                }
            }
        }
        Self {
            columns,
            attribute_names: schema.iter().map(|a| a.name.clone()).collect(),
            feature_names,
            class_source: table.class_index(),
            excluded,
        }
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Attributes that were present and left out.
    pub fn excluded(&self) -> &[String] {
        &self.excluded
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn transform(&self, table: &RawTable) -> Result<Dataset, IngestError> {
        let names: Vec<&str> = table.schema().iter().map(|a| a.name.as_str()).collect();
        if names != self.attribute_names {
            return Err(IngestError::InvalidSchema(
                "table schema differs from the one the encoder was fitted on".into(),
            ));
        }
        let d = self.dim();
        let mut features = Matrix::zeros(table.len(), d);
        let mut labels = Vec::with_capacity(table.len());
        for (r, row) in table.rows().iter().enumerate() {
            let missing = || IngestError::MissingCell { row: r };
            let out = features.row_mut(r);
            let mut k = 0;
            for col in &self.columns {
                match col {
                    Column::Pass { source } => {
                        let Some(Value::Number(v)) = &row[*source] else {
                            return Err(missing());
                        };
                        out[k] = *v;
                        k += 1;
                    }
                    Column::Flag { source } => {
                        let Some(Value::Flag(b)) = &row[*source] else {
                            return Err(missing());
                        };
                        out[k] = if *b { 1.0 } else { 0.0 };
                        k += 1;
                    }
                    Column::OneHot { source, values } => {
                        let Some(Value::Category(c)) = &row[*source] else {
                            return Err(missing());
                        };
                        let hot = values.binary_search(c).map_err(|_| {
                            IngestError::UnseenCategory {
                                attribute: self.attribute_names[*source].clone(),
                                value: c.clone(),
                            }
                        })?;
                        out[k + hot] = 1.0;
                        k += values.len();
                    }
                }
            }
            // the fitted plan ignores excluded columns, but a complete row is still required
            if row.iter().any(Option::is_none) {
                return Err(missing());
            }
            let Some(Value::Flag(class)) = &row[self.class_source] else {
                return Err(missing());
            };
            labels.push(u8::from(*class));
        }
        Dataset::new(features, labels, self.feature_names.clone())
    }
}

/// Fits an encoder on `table` and applies it.
pub fn encode(table: &RawTable, options: &EncodeOptions) -> Result<(Dataset, Encoder), IngestError> {
    let encoder = Encoder::fit(table, options);
    let data = encoder.transform(table)?;
    Ok((data, encoder))
}
