use std::fs::File;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DataFormat, ExperimentConfig};
use super::RunError;
use crate::classifiers::{fit, predict, ClassifierSpec, SvmDiagnostics, TrainedModel};
use crate::ingest::{
    drop_missing, encode, merge_tables, parse_table, split, standardize, CsvSchema, Dataset,
    EncodeOptions, ParseOptions, RawTable, TableFormat,
};
use crate::metrics::{evaluate, ClassMetrics, MetricReport};

pub const REPORT_FORMAT: &str = "asdbench-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub path: String,
    pub relation: String,
    pub rows: usize,
}

/// Where the rows came from and what cleaning and encoding did to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub sources: Vec<SourceSummary>,
    pub rows_parsed: usize,
    pub rows_dropped: usize,
    pub rows_clean: usize,
    pub positives: usize,
    pub encoded_dim: usize,
    pub feature_names: Vec<String>,
    pub excluded: Vec<String>,
}

/// One fitted learner evaluated on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRun {
    pub name: String,
    /// Hyperparameters after per-split resolution.
    pub spec: ClassifierSpec,
    pub report: MetricReport,
    /// Hard labels on the test rows, in test order.
    pub predicted: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svm: Option<SvmDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub train_rows: usize,
    /// Rows of the cleaned dataset held out for testing, in post-shuffle order.
    pub test_indices: Vec<usize>,
    pub actual: Vec<u8>,
    pub classifiers: Vec<ModelRun>,
    pub kernels: Vec<ModelRun>,
}

/// Metrics averaged over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub name: String,
    pub accuracy: f64,
    pub accuracy_sd: f64,
    pub auc: f64,
    pub no: ClassMetrics,
    pub yes: ClassMetrics,
    /// Runs in which at least one metric hit a zero denominator.
    pub degenerate_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub classifiers: Vec<MeanMetrics>,
    pub kernels: Vec<MeanMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleColumn {
    pub name: String,
    pub predicted: Vec<u8>,
}

/// Leading test rows of the first seed with actual and predicted labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable {
    pub seed: u64,
    pub rows: Vec<usize>,
    pub actual: Vec<u8>,
    pub models: Vec<SampleColumn>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportBundle {
    pub format: String,
    pub version: u32,
    pub config: ExperimentConfig,
    pub data: DataSummary,
    pub runs: Vec<SeedRun>,
    pub summary: Summary,
    pub sample: SampleTable,
}

impl ReportBundle {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let bundle: ReportBundle =
            serde_json::from_str(text).map_err(|e| RunError::Report(e.to_string()))?;
        if bundle.format != REPORT_FORMAT || bundle.version != REPORT_VERSION {
            return Err(RunError::Report(format!(
                "expected {REPORT_FORMAT} version {REPORT_VERSION}, found {} version {}",
                bundle.format, bundle.version
            )));
        }
        if bundle.runs.is_empty() {
            return Err(RunError::Report("report holds no runs".into()));
        }
        Ok(bundle)
    }
}

pub(crate) fn load_table(cfg: &ExperimentConfig, index: usize) -> Result<RawTable, RunError> {
    let source = &cfg.data[index];
    let path = cfg.resolve_path(&source.path);
    let context = path.display().to_string();
    let data_err = |source| RunError::Data {
        context: context.clone(),
        source,
    };
    let format = match source.format {
        Some(DataFormat::Csv) => {
            let schema_path = cfg.resolve_path(source.schema.as_deref().unwrap_or_default());
            let text = std::fs::read_to_string(&schema_path).map_err(|e| RunError::Data {
                context: schema_path.display().to_string(),
                source: e.into(),
            })?;
            TableFormat::Csv(CsvSchema::parse(&text).map_err(|e| RunError::Data {
                context: schema_path.display().to_string(),
                source: e,
            })?)
        }
        _ => TableFormat::Arff,
    };
    let file = File::open(&path).map_err(|e| data_err(e.into()))?;
    let options = ParseOptions {
        class_attribute: cfg.class_attribute.clone(),
    };
    parse_table(std::io::BufReader::new(file), &format, &options).map_err(data_err)
}

/// Cleaned, encoded data plus its summary.
pub struct PreparedData {
    pub dataset: Dataset,
    pub summary: DataSummary,
}

/// parse → merge → drop_missing → encode.
pub fn prepare_data(cfg: &ExperimentConfig) -> Result<PreparedData, RunError> {
    let mut tables = Vec::with_capacity(cfg.data.len());
    let mut sources = Vec::with_capacity(cfg.data.len());
    for (i, source) in cfg.data.iter().enumerate() {
        let t = load_table(cfg, i)?;
        sources.push(SourceSummary {
            path: source.path.clone(),
            relation: t.relation().to_string(),
            rows: t.len(),
        });
        tables.push(t);
    }
    let merged = merge_tables(&tables).map_err(|source| RunError::Data {
        context: "merge".into(),
        source,
    })?;
    let (clean, dropped) = drop_missing(&merged);
    if clean.is_empty() {
        return Err(RunError::EmptyAfterCleaning { dropped });
    }
    let options = EncodeOptions {
        exclude: cfg.exclude.clone(),
    };
    let (dataset, encoder) = encode(&clean, &options).map_err(|source| RunError::Data {
        context: "encode".into(),
        source,
    })?;
    let summary = DataSummary {
        sources,
        rows_parsed: merged.len(),
        rows_dropped: dropped,
        rows_clean: clean.len(),
        positives: dataset.positives(),
        encoded_dim: dataset.dim(),
        feature_names: dataset.feature_names.clone(),
        excluded: encoder.excluded().to_vec(),
    };
    Ok(PreparedData { dataset, summary })
}

/// Appends `-2`, `-3`, … to repeated names.
fn unique_names(base: impl Iterator<Item = &'static str>) -> Vec<String> {
    let mut seen: Vec<(&str, usize)> = Vec::new();
    base.map(|b| match seen.iter_mut().find(|(n, _)| *n == b) {
        Some((_, count)) => {
            *count += 1;
            format!("{b}-{count}")
        }
        None => {
            seen.push((b, 1));
            b.to_string()
        }
    })
    .collect()
}

struct Job<'a> {
    seed: u64,
    name: &'a str,
    spec: ClassifierSpec,
    kernel_sweep: bool,
    train: &'a Dataset,
    test: &'a Dataset,
}

struct SplitData {
    seed: u64,
    train_rows: usize,
    test_indices: Vec<usize>,
    raw: (Dataset, Dataset),
    scaled: (Dataset, Dataset),
}

fn run_job(job: &Job) -> Result<ModelRun, RunError> {
    let train_err = |source| RunError::Training {
        seed: job.seed,
        model: job.name.to_string(),
        source,
    };
    let model = fit(job.train, &job.spec).map_err(train_err)?;
    let mut scores = Vec::with_capacity(job.test.len());
    let mut predicted = Vec::with_capacity(job.test.len());
    for row in job.test.features.iter_rows() {
        let p = predict(&model, row).map_err(train_err)?;
        scores.push(p.score);
        predicted.push(p.label);
    }
    let report = evaluate(&job.test.labels, &predicted, &scores).map_err(|e| RunError::Evaluation {
        seed: job.seed,
        model: job.name.to_string(),
        message: e.to_string(),
    })?;
    let svm = match &model {
        TrainedModel::Svm(m) => Some(m.diagnostics),
        _ => None,
    };
    Ok(ModelRun {
        name: job.name.to_string(),
        spec: job.spec,
        report,
        predicted,
        svm,
    })
}

fn mean_metrics(name: &str, runs: &[&ModelRun]) -> MeanMetrics {
    let n = runs.len() as f64;
    let mean = |f: &dyn Fn(&ModelRun) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / n;
    let accuracy = mean(&|r| r.report.accuracy);
    let var = runs
        .iter()
        .map(|r| (r.report.accuracy - accuracy).powi(2))
        .sum::<f64>()
        / n;
    let class = |pick: &dyn Fn(&ModelRun) -> ClassMetrics| ClassMetrics {
        precision: mean(&|r| pick(r).precision),
        recall: mean(&|r| pick(r).recall),
        f1: mean(&|r| pick(r).f1),
    };
    MeanMetrics {
        name: name.to_string(),
        accuracy,
        accuracy_sd: var.sqrt(),
        auc: mean(&|r| r.report.auc),
        no: class(&|r| r.report.no),
        yes: class(&|r| r.report.yes),
        degenerate_runs: runs.iter().filter(|r| !r.report.degenerate.is_empty()).count(),
    }
}

/// Runs the comparison and the kernel sweep for every seed. The result
/// depends only on the config and the input files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportBundle, RunError> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    let prepared = prepare_data(&cfg)?;
    let data = &prepared.dataset;

    let mut splits = Vec::with_capacity(cfg.repeat);
    for seed in cfg.seeds() {
        let s = split(data, cfg.train_fraction, seed).map_err(|source| RunError::Data {
            context: format!("split with seed {seed}"),
            source,
        })?;
        for (part, d) in [("training", &s.train), ("test", &s.test)] {
            if !d.has_both_classes() {
                return Err(RunError::SingleClassSplit { seed, part });
            }
        }
        let (train_s, test_s, _) = standardize(&s.train, &s.test).map_err(|source| RunError::Data {
            context: format!("standardize with seed {seed}"),
            source,
        })?;
        splits.push(SplitData {
            seed,
            train_rows: s.train_indices.len(),
            test_indices: s.test_indices,
            raw: (s.train, s.test),
            scaled: (train_s, test_s),
        });
    }

    let classifier_names = unique_names(cfg.classifiers.iter().map(|c| c.short_name()));
    let kernel_names = unique_names(cfg.kernels.iter().map(|k| k.family_name()));
    let mut jobs = Vec::new();
    for sd in &splits {
        let pick = |spec: &ClassifierSpec| {
            if spec.wants_standardized() {
                (&sd.scaled.0, &sd.scaled.1)
            } else {
                (&sd.raw.0, &sd.raw.1)
            }
        };
        for (c, name) in cfg.classifiers.iter().zip(&classifier_names) {
            let spec = c.resolve(&sd.scaled.0.features);
            let (train, test) = pick(&spec);
            jobs.push(Job {
                seed: sd.seed,
                name,
                spec,
                kernel_sweep: false,
                train,
                test,
            });
        }
        for (k, name) in cfg.kernels.iter().zip(&kernel_names) {
            let spec = ClassifierSpec::Svm(cfg.svm.with_kernel(k.resolve(&sd.scaled.0.features)));
            let (train, test) = pick(&spec);
            jobs.push(Job {
                seed: sd.seed,
                name,
                spec,
                kernel_sweep: true,
                train,
                test,
            });
        }
    }
    let results: Vec<Result<ModelRun, RunError>> = jobs.par_iter().map(run_job).collect();

    let mut results = results.into_iter();
    let mut runs = Vec::with_capacity(splits.len());
    for sd in &splits {
        let mut classifiers = Vec::with_capacity(cfg.classifiers.len());
        let mut kernels = Vec::with_capacity(cfg.kernels.len());
        for job in jobs.iter().filter(|j| j.seed == sd.seed) {
            let run = results.next().expect("one result per job")?;
            if job.kernel_sweep {
                kernels.push(run);
            } else {
                classifiers.push(run);
            }
        }
        runs.push(SeedRun {
            seed: sd.seed,
            train_rows: sd.train_rows,
            test_indices: sd.test_indices.clone(),
            actual: sd.raw.1.labels.clone(),
            classifiers,
            kernels,
        });
    }

    let summarise = |names: &[String], pick: &dyn Fn(&SeedRun) -> &[ModelRun]| -> Vec<MeanMetrics> {
        names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let per_seed: Vec<&ModelRun> = runs.iter().map(|r| &pick(r)[i]).collect();
                mean_metrics(name, &per_seed)
            })
            .collect()
    };
    let summary = Summary {
        classifiers: summarise(&classifier_names, &|r| &r.classifiers),
        kernels: summarise(&kernel_names, &|r| &r.kernels),
    };
    let sample = sample_from_run(&runs[0], cfg.sample_rows)?;
    Ok(ReportBundle {
        format: REPORT_FORMAT.into(),
        version: REPORT_VERSION,
        config: cfg,
        data: prepared.summary,
        runs,
        summary,
        sample,
    })
}

fn sample_from_run(run: &SeedRun, n: usize) -> Result<SampleTable, RunError> {
    if n > run.actual.len() {
        return Err(RunError::SampleTooLarge {
            requested: n,
            available: run.actual.len(),
        });
    }
    Ok(SampleTable {
        seed: run.seed,
        rows: run.test_indices[..n].to_vec(),
        actual: run.actual[..n].to_vec(),
        models: run
            .classifiers
            .iter()
            .chain(&run.kernels)
            .map(|m| SampleColumn {
                name: m.name.clone(),
                predicted: m.predicted[..n].to_vec(),
            })
            .collect(),
    })
}

/// First `n` test rows of the first seed, with every model's prediction.
pub fn sample_comparison(bundle: &ReportBundle, n: usize) -> Result<SampleTable, RunError> {
    let run = bundle
        .runs
        .first()
        .ok_or_else(|| RunError::Report("report holds no runs".into()))?;
    sample_from_run(run, n)
}
