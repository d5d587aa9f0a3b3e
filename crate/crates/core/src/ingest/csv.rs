//! CSV tables with a header row. Attribute kinds come from a sidecar
//! schema of `name=kind` lines; categorical value sets are collected from
//! the data. Empty cells and `?` are missing.

use std::collections::BTreeSet;

use super::table::{AttributeKind, AttributeSpec, Cell, RawTable};
use super::IngestError;

/// Declared kind per column name, in sidecar order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    entries: Vec<(String, ColumnKind)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    BinaryScore,
    Boolean,
    Categorical,
    Numeric,
    ClassLabel,
}

impl CsvSchema {
    /// Parses sidecar text. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let malformed = |message: String| IngestError::MalformedHeader {
                line: i + 1,
                message,
            };
            let (name, kind) = t
                .rsplit_once('=')
                .ok_or_else(|| malformed(format!("expected `name=kind`, got `{t}`")))?;
            let kind = match kind.trim() {
                "binary_score" => ColumnKind::BinaryScore,
                "boolean" => ColumnKind::Boolean,
                "categorical" => ColumnKind::Categorical,
                "numeric" => ColumnKind::Numeric,
                "class_label" => ColumnKind::ClassLabel,
                other => return Err(malformed(format!("unknown kind `{other}`"))),
            };
            entries.push((name.trim().to_string(), kind));
        }
        Ok(Self { entries })
    }

    fn kind_of(&self, name: &str) -> Option<ColumnKind> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, k)| *k)
    }
}

fn is_missing(raw: &str) -> bool {
    let t = raw.trim();
    t.is_empty() || t == "?"
}

/// Parses CSV text against a sidecar schema.
pub fn parse_csv(text: &str, schema: &CsvSchema) -> Result<RawTable, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::MalformedHeader {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();

    let mut kinds = Vec::with_capacity(names.len());
    for name in &names {
        let kind = schema.kind_of(name).ok_or_else(|| IngestError::MalformedHeader {
            line: 1,
            message: format!("column `{name}` has no kind in the schema file"),
        })?;
        kinds.push(kind);
    }

    let mut records: Vec<(usize, Vec<String>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| IngestError::MalformedHeader {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != names.len() {
            return Err(IngestError::Arity {
                line,
                expected: names.len(),
                found: rec.len(),
            });
        }
        records.push((line, rec.iter().map(|s| s.trim().to_string()).collect()));
    }

    let schema: Vec<AttributeSpec> = names
        .iter()
        .zip(&kinds)
        .enumerate()
        .map(|(j, (name, kind))| {
            let kind = match kind {
                ColumnKind::BinaryScore => AttributeKind::BinaryScore,
                ColumnKind::Boolean => AttributeKind::Boolean,
                ColumnKind::Numeric => AttributeKind::Numeric,
                ColumnKind::ClassLabel => AttributeKind::ClassLabel,
                ColumnKind::Categorical => {
                    let values: BTreeSet<String> = records
                        .iter()
                        .map(|(_, r)| r[j].as_str())
                        .filter(|v| !is_missing(v))
                        .map(str::to_string)
                        .collect();
                    AttributeKind::Categorical(values.into_iter().collect())
                }
            };
            AttributeSpec::new(name.clone(), kind)
        })
        .collect();

    let mut rows = Vec::with_capacity(records.len());
    for (line, rec) in &records {
        let mut row: Vec<Cell> = Vec::with_capacity(schema.len());
        for (attr, raw) in schema.iter().zip(rec) {
            if is_missing(raw) {
                row.push(None);
                continue;
            }
            let v = attr.kind.read(raw).ok_or_else(|| IngestError::InvalidCell {
                line: *line,
                attribute: attr.name.clone(),
                value: raw.clone(),
            })?;
            row.push(Some(v));
        }
        rows.push(row);
    }
    RawTable::new("csv", schema, rows)
}
