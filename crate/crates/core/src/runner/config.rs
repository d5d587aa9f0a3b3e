use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::classifiers::{
    ClassifierSpec, DecisionTreeSpec, GradientBoostSpec, KnnSpec,
    LogisticSpec, MlpSpec, NaiveBayesSpec, SvmSpec,
};
use crate::ingest::EncodeOptions;
use crate::matrix::Matrix;
use crate::numkernel::{scale_gamma, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    Arff,
    Csv,
}

/// One input file. `format` defaults from the extension; a CSV file's
/// `schema` defaults to `<stem>.schema` next to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<DataFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
}

impl DataSource {
    pub fn new(path: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            format: None,
            schema: None,
        }
    }

    fn resolve(&mut self) -> Result<(), RunError> {
        if self.format.is_none() {
            let ext = Path::new(&self.path)
                .extension()
                .and_then(|e| e.to_str())
                .map(str::to_ascii_lowercase);
            self.format = match ext.as_deref() {
                Some("arff") => Some(DataFormat::Arff),
                Some("csv") => Some(DataFormat::Csv),
                _ => {
                    return Err(RunError::Config(format!(
                        "cannot infer the format of `{}`; set \"format\"",
                        self.path
                    )))
                }
            };
        }
        if self.format == Some(DataFormat::Csv) && self.schema.is_none() {
            self.schema = Some(
                Path::new(&self.path)
                    .with_extension("schema")
                    .to_string_lossy()
                    .into_owned(),
            );
        }
        if self.format == Some(DataFormat::Arff) && self.schema.is_some() {
            return Err(RunError::Config(format!(
                "`{}`: \"schema\" only applies to CSV input",
                self.path
            )));
        }
        Ok(())
    }
}

/// Kernel as written in a config. An absent `gamma` is resolved per split
/// from the standardised training matrix: `1/(d * mean variance)` for RBF,
/// `1/d` for polynomial and sigmoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelChoice {
    Linear,
    Polynomial {
        #[serde(default = "default_degree")]
        degree: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default = "one")]
        coef0: f64,
    },
    Rbf {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    Sigmoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default)]
        coef0: f64,
    },
}

fn default_degree() -> u32 {
    3
}

fn one() -> f64 {
    1.0
}

impl KernelChoice {
    pub fn polynomial() -> Self {
        KernelChoice::Polynomial {
            degree: 3,
            gamma: None,
            coef0: 1.0,
        }
    }

    pub fn rbf() -> Self {
        KernelChoice::Rbf { gamma: None }
    }

    pub fn sigmoid() -> Self {
        KernelChoice::Sigmoid {
            gamma: None,
            coef0: 0.0,
        }
    }

    /// Polynomial, Gaussian and sigmoid with data-derived gamma.
    pub fn default_sweep() -> Vec<KernelChoice> {
        vec![Self::polynomial(), Self::rbf(), Self::sigmoid()]
    }

    pub fn family_name(&self) -> &'static str {
        self.resolve_with(1, 1.0).family_name()
    }

    fn resolve_with(&self, d: usize, scale: f64) -> KernelSpec {
        let inv_d = 1.0 / d.max(1) as f64;
        match *self {
            KernelChoice::Linear => KernelSpec::Linear,
            KernelChoice::Polynomial {
                degree,
                gamma,
                coef0,
            } => KernelSpec::Polynomial {
                degree,
                gamma: gamma.unwrap_or(inv_d),
                coef0,
            },
            KernelChoice::Rbf { gamma } => KernelSpec::Rbf {
                gamma: gamma.unwrap_or(scale),
            },
            KernelChoice::Sigmoid { gamma, coef0 } => KernelSpec::Sigmoid {
                gamma: gamma.unwrap_or(inv_d),
                coef0,
            },
        }
    }

    /// Concrete kernel for a training matrix.
    pub fn resolve(&self, train: &Matrix) -> KernelSpec {
        let scale = match self {
            KernelChoice::Rbf { gamma: None } => scale_gamma(train),
            _ => 1.0,
        };
        self.resolve_with(train.cols(), scale)
    }

    fn validate(&self) -> Result<(), String> {
        self.resolve_with(1, 1.0)
            .validate()
            .map_err(|e| e.to_string())
    }
}

/// SMO settings shared by every kernel in the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmSolverConfig {
    pub c: f64,
    pub tol: f64,
    pub eps: f64,
    pub max_passes: usize,
    pub pass_cap: usize,
}

impl Default for SvmSolverConfig {
    fn default() -> Self {
        let s = SvmSpec::default();
        Self {
            c: s.c,
            tol: s.tol,
            eps: s.eps,
            max_passes: s.max_passes,
            pass_cap: s.pass_cap,
        }
    }
}

impl SvmSolverConfig {
    pub fn with_kernel(&self, kernel: KernelSpec) -> SvmSpec {
        SvmSpec {
            c: self.c,
            kernel,
            tol: self.tol,
            eps: self.eps,
            max_passes: self.max_passes,
            pass_cap: self.pass_cap,
        }
    }
}

/// SVM entry of the classifier list; the kernel may leave gamma open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    pub c: f64,
    pub kernel: KernelChoice,
    pub tol: f64,
    pub eps: f64,
    pub max_passes: usize,
    pub pass_cap: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        let s = SvmSolverConfig::default();
        Self {
            c: s.c,
            kernel: KernelChoice::rbf(),
            tol: s.tol,
            eps: s.eps,
            max_passes: s.max_passes,
            pass_cap: s.pass_cap,
        }
    }
}

impl SvmConfig {
    fn solver(&self) -> SvmSolverConfig {
        SvmSolverConfig {
            c: self.c,
            tol: self.tol,
            eps: self.eps,
            max_passes: self.max_passes,
            pass_cap: self.pass_cap,
        }
    }
}

/// Classifier entry as written in a config. Absent hyperparameters take
/// their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClassifierConfig {
    NaiveBayes(NaiveBayesSpec),
    Knn(KnnSpec),
    Logistic(LogisticSpec),
    GradientBoost(GradientBoostSpec),
    DecisionTree(DecisionTreeSpec),
    Svm(SvmConfig),
    Mlp(MlpSpec),
}

impl ClassifierConfig {
    pub fn default_suite() -> Vec<ClassifierConfig> {
        ClassifierSpec::default_suite()
            .into_iter()
            .map(|s| match s {
                ClassifierSpec::Svm(_) => ClassifierConfig::Svm(SvmConfig::default()),
                other => ClassifierConfig::fixed(other),
            })
            .collect()
    }

    /// Wraps a fully specified learner.
    pub fn fixed(spec: ClassifierSpec) -> Self {
        match spec {
            ClassifierSpec::NaiveBayes(s) => ClassifierConfig::NaiveBayes(s),
            ClassifierSpec::Knn(s) => ClassifierConfig::Knn(s),
            ClassifierSpec::Logistic(s) => ClassifierConfig::Logistic(s),
            ClassifierSpec::GradientBoost(s) => ClassifierConfig::GradientBoost(s),
            ClassifierSpec::DecisionTree(s) => ClassifierConfig::DecisionTree(s),
            ClassifierSpec::Mlp(s) => ClassifierConfig::Mlp(s),
            ClassifierSpec::Svm(s) => ClassifierConfig::Svm(SvmConfig {
                c: s.c,
                kernel: match s.kernel {
                    KernelSpec::Linear => KernelChoice::Linear,
                    KernelSpec::Polynomial {
                        degree,
                        gamma,
                        coef0,
                    } => KernelChoice::Polynomial {
                        degree,
                        gamma: Some(gamma),
                        coef0,
                    },
                    KernelSpec::Rbf { gamma } => KernelChoice::Rbf { gamma: Some(gamma) },
                    KernelSpec::Sigmoid { gamma, coef0 } => KernelChoice::Sigmoid {
                        gamma: Some(gamma),
                        coef0,
                    },
                },
                tol: s.tol,
                eps: s.eps,
                max_passes: s.max_passes,
                pass_cap: s.pass_cap,
            }),
        }
    }

    /// Concrete learner for a standardised training matrix.
    pub fn resolve(&self, standardized_train: &Matrix) -> ClassifierSpec {
        match *self {
            ClassifierConfig::NaiveBayes(s) => ClassifierSpec::NaiveBayes(s),
            ClassifierConfig::Knn(s) => ClassifierSpec::Knn(s),
            ClassifierConfig::Logistic(s) => ClassifierSpec::Logistic(s),
            ClassifierConfig::GradientBoost(s) => ClassifierSpec::GradientBoost(s),
            ClassifierConfig::DecisionTree(s) => ClassifierSpec::DecisionTree(s),
            ClassifierConfig::Mlp(s) => ClassifierSpec::Mlp(s),
            ClassifierConfig::Svm(s) => {
                ClassifierSpec::Svm(s.solver().with_kernel(s.kernel.resolve(standardized_train)))
            }
        }
    }

    pub fn short_name(&self) -> &'static str {
        self.resolve(&Matrix::zeros(0, 0)).short_name()
    }

    fn validate(&self) -> Result<(), String> {
        if let ClassifierConfig::Svm(s) = self {
            s.kernel.validate()?;
        }
        self.resolve(&Matrix::zeros(0, 0))
            .validate()
            .map_err(|e| e.to_string())
    }
}

fn default_train_fraction() -> f64 {
    0.7
}

fn default_repeat() -> usize {
    1
}

fn default_output_dir() -> String {
    "results".into()
}

fn encode_defaults() -> Vec<String> {
    EncodeOptions::default().exclude
}

fn default_sample_rows() -> usize {
    10
}

/// Experiment description read from JSON. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: Vec<DataSource>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    /// Number of seeds, `seed..seed + repeat`.
    #[serde(default = "default_repeat")]
    pub repeat: usize,
    #[serde(default = "ClassifierConfig::default_suite")]
    pub classifiers: Vec<ClassifierConfig>,
    #[serde(default = "KernelChoice::default_sweep")]
    pub kernels: Vec<KernelChoice>,
    #[serde(default)]
    pub svm: SvmSolverConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    /// Attributes left out of the feature matrix.
    #[serde(default = "encode_defaults")]
    pub exclude: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_attribute: Option<String>,
    /// Rows in the actual-vs-predicted sample table.
    #[serde(default = "default_sample_rows")]
    pub sample_rows: usize,
    /// Directory relative paths are resolved against. Not serialised.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    /// Config over `paths` with every other key at its default.
    pub fn for_paths<S: Into<String>>(paths: impl IntoIterator<Item = S>) -> Self {
        let mut cfg: ExperimentConfig =
            serde_json::from_str("{\"data\":[]}").expect("empty config parses");
        cfg.data = paths.into_iter().map(DataSource::new).collect();
        cfg
    }

    /// Parses config text, fills defaults and checks ranges. Relative paths
    /// are later resolved against `base_dir`.
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, RunError> {
        let mut cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Resolves per-file defaults and checks every range. Idempotent.
    pub fn validate(&mut self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.data.is_empty() {
            return bad("at least one data file is required".into());
        }
        for d in &mut self.data {
            d.resolve()?;
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!(
                "train_fraction {} must lie strictly between 0 and 1",
                self.train_fraction
            ));
        }
        if self.repeat == 0 {
            return bad("repeat must be at least 1".into());
        }
        if self.seed.checked_add(self.repeat as u64 - 1).is_none() {
            return bad("seed + repeat overflows".into());
        }
        if self.classifiers.is_empty() && self.kernels.is_empty() {
            return bad("at least one classifier or kernel entry is required".into());
        }
        for (i, c) in self.classifiers.iter().enumerate() {
            if let Err(e) = c.validate() {
                return bad(format!("classifiers[{i}] ({}): {e}", c.short_name()));
            }
        }
        for (i, k) in self.kernels.iter().enumerate() {
            if let Err(e) = k.validate() {
                return bad(format!("kernels[{i}]: {e}"));
            }
        }
        if !self.kernels.is_empty() {
            if let Err(e) = self.svm.with_kernel(KernelSpec::Linear).validate() {
                return bad(format!("svm: {e}"));
            }
        }
        if self.output_dir.is_empty() {
            return bad("output_dir must not be empty".into());
        }
        Ok(())
    }

    /// Seeds of the repeated splits, in order.
    pub fn seeds(&self) -> impl Iterator<Item = u64> {
        let seed = self.seed;
        (0..self.repeat as u64).map(move |r| seed + r)
    }

    pub fn resolve_path(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve_path(&self.output_dir)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialise")
    }
}

/// Reads and validates a config file. Relative paths inside it resolve
/// against the file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, RunError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    ExperimentConfig::from_json(&text, base)
}
