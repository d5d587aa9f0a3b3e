//! Shared fixtures for the integration and acceptance tests.
#![allow(dead_code)]

pub mod checks;
pub mod oracles;
pub mod replica;

use std::path::PathBuf;

/// Names of the three public screening files.
pub const SCREENING_FILES: [&str; 3] = [
    "Autism-Child-Data.arff",
    "Autism-Adolescent-Data.arff",
    "Autism-Adult-Data.arff",
];

/// Directory holding the real screening files, from `ASDBENCH_UCI_DIR`,
/// when every file is present.
pub fn uci_dir() -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os("ASDBENCH_UCI_DIR")?);
    SCREENING_FILES
        .iter()
        .all(|f| dir.join(f).is_file())
        .then_some(dir)
}

/// Screening files for dataset-level tests: the real ones when available,
/// otherwise a replica written into `scratch`. The label says which.
pub fn screening_data(scratch: &std::path::Path) -> (Vec<PathBuf>, &'static str) {
    match uci_dir() {
        Some(dir) => (
            SCREENING_FILES.iter().map(|f| dir.join(f)).collect(),
            "UCI screening files",
        ),
        None => (replica::write_replica(scratch), "synthetic replica"),
    }
}
