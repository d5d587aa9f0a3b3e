//! Seven binary classifiers behind one fit/predict contract.
//!
//! Every fitted model yields a real-valued score (higher means more likely
//! `YES`) and a hard label obtained by a strict comparison against the
//! family's threshold: 0 for the SVM decision value, 0.5 for the
//! probabilistic families. A score exactly on the threshold is labelled 0.

mod boosting;
mod knn;
mod logistic;
mod mlp;
mod naive_bayes;
pub mod svm;
pub mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Dataset, ScalerParams};
use crate::numkernel::{KernelError, KernelSpec};

pub use boosting::{fit_gradient_boost, training_loss_trajectory, GradientBoostModel};
pub use knn::{fit_knn, KnnModel};
pub use logistic::{fit_logistic, logistic_loss_and_gradient, LogisticModel};
pub use mlp::{fit_mlp, mlp_loss_and_gradient, MlpModel, MlpParams};
pub use naive_bayes::{fit_naive_bayes, NaiveBayesModel, NbColumn};
pub use svm::{fit_svm, SvmDiagnostics, SvmModel};
pub use tree::{gini_impurity, Node, Tree};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("training data is empty")]
    EmptyTraining,
    #[error("training data contains a single class")]
    SingleClass,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("k = {k} exceeds the {n} training rows")]
    KTooLarge { k: usize, n: usize },
    #[error("loss became non-finite at iteration {iteration}; the learning rate is likely too large")]
    NonFiniteLoss { iteration: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("dimension mismatch: model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model document: {0}")]
    Document(String),
}

fn check_training(train: &Dataset) -> Result<(), FitError> {
    if train.is_empty() {
        Err(FitError::EmptyTraining)
    } else {
        Ok(())
    }
}

fn check_two_classes(train: &Dataset) -> Result<(), FitError> {
    check_training(train)?;
    if train.has_both_classes() {
        Ok(())
    } else {
        Err(FitError::SingleClass)
    }
}

fn invalid(msg: impl Into<String>) -> FitError {
    FitError::InvalidHyperparameter(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NaiveBayesSpec {
    pub alpha: f64,
}

impl Default for NaiveBayesSpec {
    fn default() -> Self {
        Self { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnSpec {
    pub k: usize,
}

impl Default for KnnSpec {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticSpec {
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl Default for LogisticSpec {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            l2_lambda: 1e-4,
            max_iters: 2000,
            grad_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradientBoostSpec {
    pub rounds: usize,
    pub max_depth: usize,
    pub shrinkage: f64,
}

impl Default for GradientBoostSpec {
    fn default() -> Self {
        Self {
            rounds: 100,
            max_depth: 3,
            shrinkage: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionTreeSpec {
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for DecisionTreeSpec {
    fn default() -> Self {
        Self {
            max_depth: Some(10),
            min_leaf: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmSpec {
    pub c: f64,
    pub kernel: KernelSpec,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Minimum multiplier change counted as progress.
    pub eps: f64,
    /// Consecutive passes without any update before stopping.
    pub max_passes: usize,
    /// Absolute cap on full passes over the data.
    pub pass_cap: usize,
}

impl Default for SvmSpec {
    fn default() -> Self {
        Self {
            c: 1.0,
            kernel: KernelSpec::Rbf { gamma: 1.0 },
            tol: 1e-3,
            eps: 1e-5,
            max_passes: 10,
            pass_cap: svm::DEFAULT_PASS_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpSpec {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub init_seed: u64,
}

impl Default for MlpSpec {
    fn default() -> Self {
        Self {
            hidden_units: 16,
            learning_rate: 0.01,
            epochs: 200,
            init_seed: 0,
        }
    }
}

fn positive(v: f64, what: &str) -> Result<(), FitError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be positive")))
    }
}

impl NaiveBayesSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        positive(self.alpha, "alpha")
    }
}

impl KnnSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.k % 2 == 1 {
            Ok(())
        } else {
            Err(invalid("k must be an odd positive integer"))
        }
    }
}

impl LogisticSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        positive(self.learning_rate, "learning_rate")?;
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(invalid("l2_lambda must be non-negative"));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(invalid("grad_tol must be non-negative"));
        }
        Ok(())
    }
}

impl GradientBoostSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.shrinkage > 0.0 && self.shrinkage <= 1.0 {
            Ok(())
        } else {
            Err(invalid("shrinkage must lie in (0, 1]"))
        }
    }
}

impl DecisionTreeSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.min_leaf == 0 {
            Err(invalid("min_leaf must be at least 1"))
        } else {
            Ok(())
        }
    }
}

impl SvmSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        positive(self.c, "C")?;
        positive(self.tol, "tol")?;
        positive(self.eps, "eps")?;
        if self.max_passes == 0 || self.pass_cap == 0 {
            return Err(invalid("max_passes and pass_cap must be at least 1"));
        }
        self.kernel.validate()?;
        Ok(())
    }
}

impl MlpSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.hidden_units == 0 {
            return Err(invalid("hidden_units must be at least 1"));
        }
        positive(self.learning_rate, "learning_rate")
    }
}

/// Learner choice with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClassifierSpec {
    NaiveBayes(NaiveBayesSpec),
    Knn(KnnSpec),
    Logistic(LogisticSpec),
    GradientBoost(GradientBoostSpec),
    DecisionTree(DecisionTreeSpec),
    Svm(SvmSpec),
    Mlp(MlpSpec),
}

impl ClassifierSpec {
    /// Short column names: NB, kNN, LR, GB, SVM, DT, MLP.
    pub fn short_name(&self) -> &'static str {
        match self {
            ClassifierSpec::NaiveBayes(_) => "NB",
            ClassifierSpec::Knn(_) => "kNN",
            ClassifierSpec::Logistic(_) => "LR",
            ClassifierSpec::GradientBoost(_) => "GB",
            ClassifierSpec::Svm(_) => "SVM",
            ClassifierSpec::DecisionTree(_) => "DT",
            ClassifierSpec::Mlp(_) => "MLP",
        }
    }

    /// Distance-, kernel- and gradient-based learners train on standardised
    /// features; the Bayes and tree learners use the raw encoding.
    pub fn wants_standardized(&self) -> bool {
        matches!(
            self,
            ClassifierSpec::Knn(_)
                | ClassifierSpec::Svm(_)
                | ClassifierSpec::Logistic(_)
                | ClassifierSpec::Mlp(_)
        )
    }

    /// Range checks on the hyperparameters alone; data-dependent conditions
    /// such as `k <= n` are checked at fit time.
    pub fn validate(&self) -> Result<(), FitError> {
        match self {
            ClassifierSpec::NaiveBayes(s) => s.validate(),
            ClassifierSpec::Knn(s) => s.validate(),
            ClassifierSpec::Logistic(s) => s.validate(),
            ClassifierSpec::GradientBoost(s) => s.validate(),
            ClassifierSpec::DecisionTree(s) => s.validate(),
            ClassifierSpec::Svm(s) => s.validate(),
            ClassifierSpec::Mlp(s) => s.validate(),
        }
    }

    /// The seven learners with default hyperparameters, in table order.
    pub fn default_suite() -> Vec<ClassifierSpec> {
        vec![
            ClassifierSpec::NaiveBayes(NaiveBayesSpec::default()),
            ClassifierSpec::Knn(KnnSpec::default()),
            ClassifierSpec::Logistic(LogisticSpec::default()),
            ClassifierSpec::GradientBoost(GradientBoostSpec::default()),
            ClassifierSpec::Svm(SvmSpec::default()),
            ClassifierSpec::DecisionTree(DecisionTreeSpec::default()),
            ClassifierSpec::Mlp(MlpSpec::default()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrainedModel {
    NaiveBayes(NaiveBayesModel),
    Knn(KnnModel),
    Logistic(LogisticModel),
    GradientBoost(GradientBoostModel),
    DecisionTree(DecisionTreeModel),
    Svm(SvmModel),
    Mlp(MlpModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    pub dim: usize,
    pub tree: Tree,
}

/// CART with Gini impurity; leaves score the positive fraction.
pub fn fit_decision_tree(
    train: &Dataset,
    spec: &DecisionTreeSpec,
) -> Result<DecisionTreeModel, FitError> {
    spec.validate()?;
    check_training(train)?;
    let targets: Vec<(f64, f64)> = train.labels.iter().map(|&y| (y as f64, 0.0)).collect();
    let presorted = tree::Presorted::new(&train.features);
    let tree = tree::grow(
        &train.features,
        &targets,
        &presorted,
        &tree::Gini,
        &tree::TreeParams {
            max_depth: spec.max_depth,
            min_leaf: spec.min_leaf,
        },
    );
    Ok(DecisionTreeModel {
        dim: train.dim(),
        tree,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: u8,
    pub score: f64,
}

impl TrainedModel {
    pub fn dim(&self) -> usize {
        match self {
            TrainedModel::NaiveBayes(m) => m.columns.len(),
            TrainedModel::Knn(m) => m.features.cols(),
            TrainedModel::Logistic(m) => m.weights.len(),
            TrainedModel::GradientBoost(m) => m.dim,
            TrainedModel::DecisionTree(m) => m.dim,
            TrainedModel::Svm(m) => m.dim,
            TrainedModel::Mlp(m) => m.params.input_dim(),
        }
    }

    /// Score above which the label is 1.
    pub fn threshold(&self) -> f64 {
        match self {
            TrainedModel::Svm(_) => 0.0,
            _ => 0.5,
        }
    }

    fn raw_score(&self, x: &[f64]) -> f64 {
        match self {
            TrainedModel::NaiveBayes(m) => m.score(x),
            TrainedModel::Knn(m) => m.score(x),
            TrainedModel::Logistic(m) => m.score(x),
            TrainedModel::GradientBoost(m) => m.score(x),
            TrainedModel::DecisionTree(m) => m.tree.predict(x),
            TrainedModel::Svm(m) => m.decision_value(x),
            TrainedModel::Mlp(m) => m.score(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, FitError> {
        predict(self, x)
    }

    /// Shape consistency of a model that did not come from [`fit`].
    fn check_shapes(&self) -> Result<(), String> {
        let dim = self.dim();
        let ok = match self {
            TrainedModel::NaiveBayes(_) | TrainedModel::Logistic(_) => true,
            TrainedModel::Knn(m) => {
                m.labels.len() == m.features.rows() && m.k >= 1 && m.k <= m.labels.len()
            }
            TrainedModel::GradientBoost(m) => {
                for t in &m.trees {
                    t.tree.check(dim)?;
                }
                true
            }
            TrainedModel::DecisionTree(m) => {
                m.tree.check(dim)?;
                true
            }
            TrainedModel::Svm(m) => {
                m.coefficients.len() == m.support_vectors.rows()
                    && (m.support_vectors.rows() == 0 || m.support_vectors.cols() == dim)
            }
            TrainedModel::Mlp(m) => {
                let h = m.params.hidden_units();
                m.params.hidden_bias.len() == h && m.params.output_weights.len() == h
            }
        };
        if ok {
            Ok(())
        } else {
            Err("inconsistent parameter shapes".into())
        }
    }
}

pub fn fit(train: &Dataset, spec: &ClassifierSpec) -> Result<TrainedModel, FitError> {
    Ok(match spec {
        ClassifierSpec::NaiveBayes(s) => TrainedModel::NaiveBayes(fit_naive_bayes(train, s)?),
        ClassifierSpec::Knn(s) => TrainedModel::Knn(fit_knn(train, s)?),
        ClassifierSpec::Logistic(s) => TrainedModel::Logistic(fit_logistic(train, s)?),
        ClassifierSpec::GradientBoost(s) => {
            TrainedModel::GradientBoost(fit_gradient_boost(train, s)?)
        }
        ClassifierSpec::DecisionTree(s) => TrainedModel::DecisionTree(fit_decision_tree(train, s)?),
        ClassifierSpec::Svm(s) => TrainedModel::Svm(fit_svm(train, s)?),
        ClassifierSpec::Mlp(s) => TrainedModel::Mlp(fit_mlp(train, s)?),
    })
}

pub fn predict(model: &TrainedModel, x: &[f64]) -> Result<Prediction, FitError> {
    let expected = model.dim();
    if x.len() != expected {
        return Err(FitError::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    let score = model.raw_score(x);
    Ok(Prediction {
        label: u8::from(score > model.threshold()),
        score,
    })
}

/// A model paired with the scaler its inputs pass through, so callers can
/// feed raw encoded rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub scaler: Option<ScalerParams>,
    pub model: TrainedModel,
}

impl FittedModel {
    /// Fits `spec`, standardising first when the family calls for it.
    pub fn fit(train: &Dataset, spec: &ClassifierSpec) -> Result<Self, FitError> {
        check_training(train)?;
        if spec.wants_standardized() {
            let scaler = ScalerParams::fit(&train.features);
            let scaled = Dataset {
                features: scaler
                    .apply(&train.features)
                    .expect("scaler fitted on the same matrix"),
                labels: train.labels.clone(),
                feature_names: train.feature_names.clone(),
            };
            Ok(Self {
                scaler: Some(scaler),
                model: fit(&scaled, spec)?,
            })
        } else {
            Ok(Self {
                scaler: None,
                model: fit(train, spec)?,
            })
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, FitError> {
        match &self.scaler {
            Some(s) => {
                if x.len() != s.dim() {
                    return Err(FitError::DimensionMismatch {
                        expected: s.dim(),
                        got: x.len(),
                    });
                }
                let mut row = x.to_vec();
                s.apply_row(&mut row);
                predict(&self.model, &row)
            }
            None => predict(&self.model, x),
        }
    }
}

pub const MODEL_FORMAT: &str = "asdbench-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    format: String,
    version: u32,
    model: FittedModel,
}

impl FittedModel {
    /// Versioned JSON document; floats use shortest round-trip encoding so
    /// reading it back reproduces every parameter bit for bit.
    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("models serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, FitError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| FitError::Document(e.to_string()))?;
        if doc.format != MODEL_FORMAT {
            return Err(FitError::Document(format!("unknown format `{}`", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(FitError::Document(format!(
                "unsupported version {}",
                doc.version
            )));
        }
        doc.model.model.check_shapes().map_err(FitError::Document)?;
        if let Some(s) = &doc.model.scaler {
            if s.dim() != doc.model.model.dim() || s.stds.len() != s.dim() {
                return Err(FitError::Document("scaler does not match the model".into()));
            }
        }
        Ok(doc.model)
    }
}

#[cfg(test)]
pub(crate) mod testdata {
    use crate::ingest::Dataset;
    use crate::matrix::Matrix;

    pub fn dataset(rows: &[&[f64]], labels: &[u8]) -> Dataset {
        let d = rows.first().map_or(0, |r| r.len());
        Dataset::new(
            Matrix::from_rows(rows),
            labels.to_vec(),
            (0..d).map(|j| format!("f{j}")).collect(),
        )
        .unwrap()
    }

    pub fn xor() -> Dataset {
        dataset(
            &[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0, 1, 1, 0],
        )
    }

    pub fn training_accuracy(model: &super::TrainedModel, data: &Dataset) -> f64 {
        let hits = data
            .features
            .iter_rows()
            .zip(&data.labels)
            .filter(|(x, &y)| model.predict(x).unwrap().label == y)
            .count();
        hits as f64 / data.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::testdata::*;
    use super::*;

    #[test]
    fn tree_pure_node_is_single_leaf() {
        let d = dataset(&[&[0.0], &[1.0], &[2.0]], &[1, 1, 1]);
        let m = fit_decision_tree(&d, &DecisionTreeSpec::default()).unwrap();
        assert_eq!(m.tree.nodes, vec![Node::Leaf { value: 1.0 }]);
    }

    #[test]
    fn tree_solves_xor_at_depth_two() {
        let spec = DecisionTreeSpec {
            max_depth: Some(2),
            min_leaf: 1,
        };
        let m = TrainedModel::DecisionTree(fit_decision_tree(&xor(), &spec).unwrap());
        assert_eq!(training_accuracy(&m, &xor()), 1.0);
    }

    #[test]
    fn tree_respects_max_depth() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 7 % 11) as f64]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let labels: Vec<u8> = (0..40).map(|i| ((i * 13) % 3 == 0) as u8).collect();
        let d = dataset(&refs, &labels);
        for depth in 0..5 {
            let spec = DecisionTreeSpec {
                max_depth: Some(depth),
                min_leaf: 1,
            };
            assert!(fit_decision_tree(&d, &spec).unwrap().tree.depth() <= depth);
        }
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let m = fit(&xor(), &ClassifierSpec::DecisionTree(DecisionTreeSpec::default())).unwrap();
        assert_eq!(
            m.predict(&[1.0]),
            Err(FitError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn threshold_tie_is_negative() {
        let m = TrainedModel::Logistic(LogisticModel {
            weights: vec![0.0],
            bias: 0.0,
            iterations: 0,
            converged: false,
        });
        assert_eq!(m.predict(&[3.0]).unwrap(), Prediction { label: 0, score: 0.5 });
    }

    #[test]
    fn json_round_trip_is_exact() {
        let d = dataset(
            &[&[0.1, 2.0], &[0.7, -1.0], &[0.3, 0.5], &[0.9, 3.3], &[0.2, 0.1]],
            &[0, 1, 0, 1, 1],
        );
        for spec in ClassifierSpec::default_suite() {
            let spec = match spec {
                ClassifierSpec::Knn(_) => ClassifierSpec::Knn(KnnSpec { k: 3 }),
                s => s,
            };
            let m = FittedModel::fit(&d, &spec).unwrap();
            let back = FittedModel::from_json(&m.to_json()).unwrap();
            assert_eq!(m, back, "{}", spec.short_name());
        }
    }

    #[test]
    fn document_header_is_checked() {
        assert!(FittedModel::from_json("{\"format\":\"x\",\"version\":1,\"model\":{}}").is_err());
        assert!(FittedModel::from_json("not json").is_err());
    }
}
