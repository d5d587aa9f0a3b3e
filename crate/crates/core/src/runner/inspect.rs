use std::fmt::Write as _;

use super::config::ExperimentConfig;
use super::experiment::load_table;
use super::RunError;
use crate::ingest::{drop_missing, encode, merge_tables, AttributeKind, EncodeOptions};

/// Schema and missing-value census of each file, then the merged view.
pub fn inspect(paths: &[String], class_attribute: Option<&str>) -> Result<String, RunError> {
    let mut cfg = ExperimentConfig::for_paths(paths.iter().cloned());
    cfg.class_attribute = class_attribute.map(str::to_string);
    cfg.validate()?;
    let mut out = String::new();
    let mut tables = Vec::new();
    for (i, source) in cfg.data.iter().enumerate() {
        let t = load_table(&cfg, i)?;
        let _ = writeln!(out, "{} (relation {}): {} rows", source.path, t.relation(), t.len());
        let census = t.missing_census();
        let name_w = t.schema().iter().map(|a| a.name.len()).max().unwrap_or(0);
        for (a, (_, missing)) in t.schema().iter().zip(&census) {
            let kind = match &a.kind {
                AttributeKind::Categorical(v) => format!("categorical ({} values)", v.len()),
                k => k.name().to_string(),
            };
            let _ = writeln!(out, "  {:name_w$}  {kind:<26} missing {missing}", a.name);
        }
        tables.push(t);
    }
    let merged = merge_tables(&tables).map_err(|source| RunError::Data {
        context: "merge".into(),
        source,
    })?;
    let (clean, dropped) = drop_missing(&merged);
    let _ = writeln!(
        out,
        "merged: {} rows, {} with missing values, {} complete",
        merged.len(),
        dropped,
        clean.len()
    );
    if !clean.is_empty() {
        let (data, _) = encode(&clean, &EncodeOptions::default()).map_err(|source| {
            RunError::Data {
                context: "encode".into(),
                source,
            }
        })?;
        let _ = writeln!(
            out,
            "encoded: {} features, {} YES / {} NO",
            data.dim(),
            data.positives(),
            data.len() - data.positives()
        );
    }
    Ok(out)
}
