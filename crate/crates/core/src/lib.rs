//! # asdbench
//!
//! A small tabular machine-learning toolkit built around the public ASD
//! screening datasets (child, adolescent and adult AQ-10 questionnaires).
//!
//! The crate is organised as a pipeline:
//!
//! - [`ingest`] parses ARFF/CSV files, merges the age-band tables, drops
//!   rows with missing cells, one-hot encodes and produces seeded splits.
//! - [`numkernel`] holds the SVM kernel functions and Gram matrices.
//! - [`classifiers`] implements seven learners from first principles behind
//!   one fit/predict contract.
//! - [`metrics`] computes confusion statistics, ROC curves and AUC.
//! - [`runner`] wires everything into experiments, reports and the
//!   `asdbench` CLI.
//!
//! All stages are deterministic: the same inputs and seed produce the same
//! models and byte-identical reports.

pub mod classifiers;
pub mod ingest;
pub mod matrix;
pub mod metrics;
pub mod numkernel;
pub mod runner;
pub mod sampling;

pub use classifiers::{ClassifierSpec, FitError, Prediction, TrainedModel};
pub use ingest::{Dataset, IngestError, RawTable};
pub use matrix::Matrix;
pub use metrics::{MetricReport, RocCurve};
pub use numkernel::KernelSpec;
pub use runner::{ExperimentConfig, ReportBundle, RunError};
