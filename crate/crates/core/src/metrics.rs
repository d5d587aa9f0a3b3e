//! Confusion statistics, per-class precision/recall/F1, ROC curves and AUC.
//!
//! The positive class is label 1 (`YES`). ROC sweeps group equal scores into
//! a single step, so the trapezoidal area equals the pairwise definition
//! `P(s+ > s-) + P(s+ = s-)/2` exactly, ties included.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {0} labels vs {1} predictions")]
    LengthMismatch(usize, usize),
    #[error("no instances to evaluate")]
    Empty,
    #[error("ROC is undefined when truth holds a single class")]
    SingleClass,
    #[error("scores must be finite")]
    NonFiniteScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub r#fn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.r#fn
    }
}

pub fn confusion(truth: &[u8], predicted: &[u8]) -> Result<ConfusionMatrix, MetricError> {
    if truth.len() != predicted.len() {
        return Err(MetricError::LengthMismatch(truth.len(), predicted.len()));
    }
    if truth.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t == 1, p == 1) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (true, false) => cm.r#fn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrfReport {
    pub accuracy: f64,
    pub no: ClassMetrics,
    pub yes: ClassMetrics,
    /// Names of metrics that hit a 0/0 and were set to 0.
    pub degenerate: Vec<String>,
}

fn ratio(num: u64, den: u64, name: &str, degenerate: &mut Vec<String>) -> f64 {
    if den == 0 {
        degenerate.push(name.to_string());
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64, name: &str, degenerate: &mut Vec<String>) -> f64 {
    if p + r == 0.0 {
        degenerate.push(name.to_string());
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Accuracy plus precision/recall/F1 for both classes. Any 0/0 is 0 and is
/// listed in `degenerate`.
pub fn prf_report(cm: &ConfusionMatrix) -> Result<PrfReport, MetricError> {
    let total = cm.total();
    if total == 0 {
        return Err(MetricError::Empty);
    }
    let mut degenerate = Vec::new();
    let precision_yes = ratio(cm.tp, cm.tp + cm.fp, "precision_yes", &mut degenerate);
    let recall_yes = ratio(cm.tp, cm.tp + cm.r#fn, "recall_yes", &mut degenerate);
    let f1_yes = harmonic(precision_yes, recall_yes, "f1_yes", &mut degenerate);
    let precision_no = ratio(cm.tn, cm.tn + cm.r#fn, "precision_no", &mut degenerate);
    let recall_no = ratio(cm.tn, cm.tn + cm.fp, "recall_no", &mut degenerate);
    let f1_no = harmonic(precision_no, recall_no, "f1_no", &mut degenerate);
    Ok(PrfReport {
        accuracy: (cm.tp + cm.tn) as f64 / total as f64,
        no: ClassMetrics {
            precision: precision_no,
            recall: recall_no,
            f1: f1_no,
        },
        yes: ClassMetrics {
            precision: precision_yes,
            recall: recall_yes,
            f1: f1_yes,
        },
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// Points from (0,0) to (1,1), non-decreasing in both coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Two-column `fpr,tpr` CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.fpr, p.tpr);
        }
        out
    }
}

fn class_counts(truth: &[u8]) -> (u64, u64) {
    let pos = truth.iter().filter(|&&t| t == 1).count() as u64;
    (pos, truth.len() as u64 - pos)
}

fn check_scores(scores: &[f64], truth: &[u8]) -> Result<(u64, u64), MetricError> {
    if scores.len() != truth.len() {
        return Err(MetricError::LengthMismatch(truth.len(), scores.len()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(MetricError::NonFiniteScore);
    }
    let (pos, neg) = class_counts(truth);
    if pos == 0 || neg == 0 {
        return Err(MetricError::SingleClass);
    }
    Ok((pos, neg))
}

/// Tie-grouped threshold sweep, highest score first.
pub fn roc_points(scores: &[f64], truth: &[u8]) -> Result<RocCurve, MetricError> {
    let (pos, neg) = check_scores(scores, truth)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if truth[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }
    // the last group already lands on (1,1); keep the explicit endpoint
    // only when it would differ
    let last = *points.last().expect("non-empty");
    if last.fpr != 1.0 || last.tpr != 1.0 {
        points.push(RocPoint { fpr: 1.0, tpr: 1.0 });
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// O(n+ · n-) pairwise count: concordant pairs plus half the ties.
pub fn auc_pairwise_oracle(scores: &[f64], truth: &[u8]) -> Result<f64, MetricError> {
    let (pos, neg) = check_scores(scores, truth)?;
    let mut twice = 0u64;
    for (i, &si) in scores.iter().enumerate() {
        if truth[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if truth[j] == 1 {
                continue;
            }
            if si > sj {
                twice += 2;
            } else if si == sj {
                twice += 1;
            }
        }
    }
    Ok(twice as f64 / (2.0 * pos as f64 * neg as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub auc: f64,
    pub no: ClassMetrics,
    pub yes: ClassMetrics,
    pub confusion: ConfusionMatrix,
    pub degenerate: Vec<String>,
    pub roc: RocCurve,
}

/// Everything needed for a results column from labels, hard predictions and
/// scores of one evaluation set.
pub fn evaluate(truth: &[u8], predicted: &[u8], scores: &[f64]) -> Result<MetricReport, MetricError> {
    let cm = confusion(truth, predicted)?;
    let prf = prf_report(&cm)?;
    let roc = roc_points(scores, truth)?;
    Ok(MetricReport {
        accuracy: prf.accuracy,
        auc: auc(&roc),
        no: prf.no,
        yes: prf.yes,
        confusion: cm,
        degenerate: prf.degenerate,
        roc,
    })
}
