//! Gradient boosting on the logistic loss.
//!
//! Each round fits a regression tree to the residuals `y - p` and sets leaf
//! values by a Newton step `sum(y - p) / sum(p(1 - p))`. The tree enters the
//! ensemble scaled by `shrinkage`; if that step would raise the training
//! loss, the scale is halved until it does not, so the staged training loss
//! never increases.

use serde::{Deserialize, Serialize};

use super::tree::{grow, NewtonResidual, Presorted, Tree, TreeParams};
use super::{check_two_classes, FitError, GradientBoostSpec};
use crate::ingest::Dataset;
use crate::matrix::{sigmoid, softplus};

const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTree {
    pub weight: f64,
    pub tree: Tree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoostModel {
    pub dim: usize,
    /// Initial log-odds of the training base rate.
    pub base_score: f64,
    pub trees: Vec<WeightedTree>,
}

impl GradientBoostModel {
    pub fn raw(&self, x: &[f64]) -> f64 {
        let mut f = self.base_score;
        for t in &self.trees {
            f += t.weight * t.tree.predict(x);
        }
        f
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw(x))
    }
}

fn mean_log_loss(f: &[f64], y: &[u8]) -> f64 {
    f.iter()
        .zip(y)
        .map(|(&z, &t)| softplus(z) - t as f64 * z)
        .sum::<f64>()
        / f.len() as f64
}

pub fn fit_gradient_boost(
    train: &Dataset,
    spec: &GradientBoostSpec,
) -> Result<GradientBoostModel, FitError> {
    spec.validate()?;
    check_two_classes(train)?;
    let x = &train.features;
    let y = &train.labels;
    let p0 = train.positives() as f64 / train.len() as f64;
    let base_score = (p0 / (1.0 - p0)).ln();
    let presorted = Presorted::new(x);
    let params = TreeParams {
        max_depth: Some(spec.max_depth),
        min_leaf: 1,
    };

    let mut f = vec![base_score; train.len()];
    let mut loss = mean_log_loss(&f, y);
    let mut trees = Vec::with_capacity(spec.rounds);
    let mut candidate = vec![0.0; f.len()];
    for _ in 0..spec.rounds {
        let targets: Vec<(f64, f64)> = f
            .iter()
            .zip(y)
            .map(|(&z, &t)| {
                let p = sigmoid(z);
                (t as f64 - p, p * (1.0 - p))
            })
            .collect();
        let tree = grow(x, &targets, &presorted, &NewtonResidual, &params);
        let contrib: Vec<f64> = x.iter_rows().map(|row| tree.predict(row)).collect();

        let mut weight = spec.shrinkage;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            for ((c, &fi), &d) in candidate.iter_mut().zip(&f).zip(&contrib) {
                *c = fi + weight * d;
            }
            let next = mean_log_loss(&candidate, y);
            if !next.is_finite() {
                return Err(FitError::NonFiniteLoss {
                    iteration: trees.len(),
                });
            }
            if next <= loss {
                loss = next;
                accepted = true;
                break;
            }
            weight /= 2.0;
        }
        if !accepted {
            // no descent left along this tree; the ensemble has converged
            break;
        }
        std::mem::swap(&mut f, &mut candidate);
        trees.push(WeightedTree { weight, tree });
    }
    Ok(GradientBoostModel {
        dim: train.dim(),
        base_score,
        trees,
    })
}

/// Mean training log-loss after 0, 1, …, T trees, accumulated in the same
/// order as during fitting.
pub fn training_loss_trajectory(model: &GradientBoostModel, data: &Dataset) -> Vec<f64> {
    let mut f = vec![model.base_score; data.len()];
    let mut out = vec![mean_log_loss(&f, &data.labels)];
    for t in &model.trees {
        for (fi, row) in f.iter_mut().zip(data.features.iter_rows()) {
            *fi += t.weight * t.tree.predict(row);
        }
        out.push(mean_log_loss(&f, &data.labels));
    }
    out
}
