//! Parsing, merging, cleaning and encoding of the screening tables.
//!
//! The flow is `parse_table` → [`merge_tables`] → [`drop_missing`] →
//! [`encode`] → [`split`] → [`standardize`]. Everything up to `encode`
//! works on a [`RawTable`], a schema-tagged grid of possibly-missing cells;
//! from `encode` onwards data is a dense [`Dataset`].

mod arff;
mod csv;
mod encode;
mod split;
mod table;

use thiserror::Error;

pub use self::arff::{parse_arff, to_arff};
pub use self::csv::{parse_csv, CsvSchema};
pub use self::encode::{encode, EncodeOptions, Encoder};
pub use self::split::{split, standardize, ScalerParams, Split};
pub use self::table::{
    drop_missing, merge_tables, AttributeKind, AttributeSpec, Cell, Dataset, RawTable, Value,
};

use std::io::Read;

/// Name of the class attribute in the public screening files.
pub const DEFAULT_CLASS_ATTRIBUTE: &str = "Class/ASD";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: value {value:?} is not valid for attribute `{attribute}`")]
    InvalidCell {
        line: usize,
        attribute: String,
        value: String,
    },
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("attribute sets differ: missing {missing:?}, unexpected {unexpected:?}")]
    SchemaMismatch {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },
    #[error("attribute `{0}` has incompatible kinds across tables")]
    IncompatibleKinds(String),
    #[error("row {row}: missing cell where a complete row is required")]
    MissingCell { row: usize },
    #[error("attribute `{attribute}`: value {value:?} was not seen when the encoder was fitted")]
    UnseenCategory { attribute: String, value: String },
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("need at least {needed} rows, have {have}")]
    TooFewRows { needed: usize, have: usize },
    #[error("split of {n} rows at fraction {fraction} leaves an empty part")]
    EmptyPart { n: usize, fraction: f64 },
    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Input syntax for [`parse_table`].
#[derive(Debug, Clone)]
pub enum TableFormat {
    Arff,
    /// CSV with a header row; kinds come from the sidecar schema.
    Csv(CsvSchema),
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Attribute treated as the class label. `None` picks `Class/ASD` when
    /// declared (case-insensitive), else the last attribute.
    pub class_attribute: Option<String>,
}

/// Parses an ARFF or CSV byte stream into a [`RawTable`].
pub fn parse_table<R: Read>(
    mut source: R,
    format: &TableFormat,
    options: &ParseOptions,
) -> Result<RawTable, IngestError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        TableFormat::Arff => parse_arff(&text, options),
        TableFormat::Csv(schema) => parse_csv(&text, schema),
    }
}

/// Case-insensitive, whitespace-trimmed yes/no reading.
pub(crate) fn parse_yes_no(raw: &str) -> Option<bool> {
    let t = raw.trim();
    if t.eq_ignore_ascii_case("yes") {
        Some(true)
    } else if t.eq_ignore_ascii_case("no") {
        Some(false)
    } else {
        None
    }
}
