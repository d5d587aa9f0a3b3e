use serde::{Deserialize, Serialize};

use super::{check_training, FitError, LogisticSpec};
use crate::ingest::Dataset;
use crate::matrix::{dot, sigmoid, softplus, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LogisticModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }
}

/// Mean cross-entropy plus `l2/2 * |w|^2`, with its gradient in `w` and `b`.
pub fn logistic_loss_and_gradient(
    x: &Matrix,
    y: &[u8],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &label) in x.iter_rows().zip(y) {
        let z = dot(weights, row) + bias;
        let t = label as f64;
        // -[t log p + (1-t) log(1-p)] = softplus(z) - t z
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, v) in grad_w.iter_mut().zip(row) {
            *g += r * v;
        }
        grad_b += r;
    }
    loss /= n;
    grad_b /= n;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * dot(weights, weights);
    (loss, grad_w, grad_b)
}

/// Full-batch gradient descent from zero weights. Stops after `max_iters`
/// steps or once the gradient's max-norm drops below `grad_tol`.
pub fn fit_logistic(train: &Dataset, spec: &LogisticSpec) -> Result<LogisticModel, FitError> {
    spec.validate()?;
    check_training(train)?;
    let mut weights = vec![0.0; train.dim()];
    let mut bias = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < spec.max_iters {
        let (loss, gw, gb) =
            logistic_loss_and_gradient(&train.features, &train.labels, &weights, bias, spec.l2_lambda);
        if !loss.is_finite() {
            return Err(FitError::NonFiniteLoss { iteration: iterations });
        }
        let norm = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if norm < spec.grad_tol {
            converged = true;
            break;
        }
        for (w, g) in weights.iter_mut().zip(&gw) {
            *w -= spec.learning_rate * g;
        }
        bias -= spec.learning_rate * gb;
        iterations += 1;
    }
    if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
        return Err(FitError::NonFiniteLoss { iteration: iterations });
    }
    Ok(LogisticModel {
        weights,
        bias,
        iterations,
        converged,
    })
}
