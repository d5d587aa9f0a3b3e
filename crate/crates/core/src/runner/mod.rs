//! Experiment orchestration: config loading, the classifier comparison and
//! kernel sweep over repeated seeded splits, and report emission.

mod config;
mod experiment;
mod inspect;
mod report;

use thiserror::Error;

use crate::classifiers::FitError;
use crate::ingest::IngestError;

pub use config::{
    load_config, ClassifierConfig, DataFormat, DataSource, ExperimentConfig, KernelChoice,
    SvmConfig, SvmSolverConfig,
};
pub use experiment::{
    prepare_data, run_experiment, sample_comparison, DataSummary, MeanMetrics, ModelRun,
    PreparedData, ReportBundle, SampleColumn, SampleTable, SeedRun, SourceSummary, Summary,
    REPORT_FORMAT, REPORT_VERSION,
};
pub use inspect::inspect;
pub use report::{
    compare_table, emit_roc_svg, first_run_curves, kernel_table, render_roc_svg, write_outputs,
    ComparisonTable, NamedCurve, METRIC_ROWS,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Data {
        context: String,
        #[source]
        source: IngestError,
    },
    #[error("no rows left after removing {dropped} rows with missing values")]
    EmptyAfterCleaning { dropped: usize },
    #[error("seed {seed}: the {part} split contains a single class")]
    SingleClassSplit { seed: u64, part: &'static str },
    #[error("sample of {requested} rows requested but the test split has {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("seed {seed}, {model}: {source}")]
    Training {
        seed: u64,
        model: String,
        #[source]
        source: FitError,
    },
    #[error("seed {seed}, {model}: evaluation failed: {message}")]
    Evaluation {
        seed: u64,
        model: String,
        message: String,
    },
    #[error("report: {0}")]
    Report(String),
    #[error("{path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit status: 1 config, 2 data, 3 training.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::SampleTooLarge { .. } | RunError::Output { .. } => 1,
            RunError::Data { .. }
            | RunError::EmptyAfterCleaning { .. }
            | RunError::SingleClassSplit { .. }
            | RunError::Report(_) => 2,
            RunError::Training { .. } | RunError::Evaluation { .. } => 3,
        }
    }
}
