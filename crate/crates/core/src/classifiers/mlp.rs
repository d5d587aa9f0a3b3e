use serde::{Deserialize, Serialize};

use super::{check_training, FitError, MlpSpec};
use crate::ingest::Dataset;
use crate::matrix::{dot, sigmoid, softplus, Matrix};
use crate::sampling::SeededRng;

/// One ReLU hidden layer feeding a single sigmoid output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    /// `hidden x input`.
    pub hidden_weights: Matrix,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

impl MlpParams {
    /// Glorot-uniform hidden weights drawn row by row from `seed`;
    /// output weights and all biases start at zero.
    pub fn init(input: usize, hidden: usize, seed: u64) -> Self {
        let bound = (6.0 / (input + hidden) as f64).sqrt();
        let mut rng = SeededRng::new(seed);
        let data = (0..input * hidden).map(|_| rng.symmetric(bound)).collect();
        Self {
            hidden_weights: Matrix::from_vec(hidden, input, data),
            hidden_bias: vec![0.0; hidden],
            output_weights: vec![0.0; hidden],
            output_bias: 0.0,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.hidden_weights.cols()
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_weights.rows()
    }

    fn zeros_like(&self) -> Self {
        Self {
            hidden_weights: Matrix::zeros(self.hidden_units(), self.input_dim()),
            hidden_bias: vec![0.0; self.hidden_units()],
            output_weights: vec![0.0; self.hidden_units()],
            output_bias: 0.0,
        }
    }

    /// All parameters in a fixed order: hidden weights, hidden bias, output
    /// weights, output bias.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.hidden_weights.as_slice().to_vec();
        v.extend_from_slice(&self.hidden_bias);
        v.extend_from_slice(&self.output_weights);
        v.push(self.output_bias);
        v
    }

    /// Inverse of [`to_flat`](Self::to_flat) for the shape of `self`.
    pub fn with_flat(&self, flat: &[f64]) -> Self {
        let (h, d) = (self.hidden_units(), self.input_dim());
        assert_eq!(flat.len(), h * d + 2 * h + 1);
        Self {
            hidden_weights: Matrix::from_vec(h, d, flat[..h * d].to_vec()),
            hidden_bias: flat[h * d..h * d + h].to_vec(),
            output_weights: flat[h * d + h..h * d + 2 * h].to_vec(),
            output_bias: flat[h * d + 2 * h],
        }
    }

    fn forward(&self, x: &[f64], hidden: &mut [f64]) -> f64 {
        for (k, a) in hidden.iter_mut().enumerate() {
            *a = (dot(self.hidden_weights.row(k), x) + self.hidden_bias[k]).max(0.0);
        }
        dot(&self.output_weights, hidden) + self.output_bias
    }
}

/// Mean cross-entropy over `(x, y)` and its gradient by backpropagation.
pub fn mlp_loss_and_gradient(params: &MlpParams, x: &Matrix, y: &[u8]) -> (f64, MlpParams) {
    let n = x.rows() as f64;
    let h = params.hidden_units();
    let mut grad = params.zeros_like();
    let mut hidden = vec![0.0; h];
    let mut loss = 0.0;
    for (row, &label) in x.iter_rows().zip(y) {
        let z = params.forward(row, &mut hidden);
        let t = label as f64;
        loss += softplus(z) - t * z;
        let dz = (sigmoid(z) - t) / n;
        grad.output_bias += dz;
        for k in 0..h {
            grad.output_weights[k] += dz * hidden[k];
            if hidden[k] > 0.0 {
                let dh = dz * params.output_weights[k];
                grad.hidden_bias[k] += dh;
                for (g, v) in grad.hidden_weights.row_mut(k).iter_mut().zip(row) {
                    *g += dh * v;
                }
            }
        }
    }
    (loss / n, grad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub params: MlpParams,
    pub final_loss: Option<f64>,
}

impl MlpModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut hidden = vec![0.0; self.params.hidden_units()];
        sigmoid(self.params.forward(x, &mut hidden))
    }
}

/// Full-batch gradient descent for `epochs` steps.
pub fn fit_mlp(train: &Dataset, spec: &MlpSpec) -> Result<MlpModel, FitError> {
    spec.validate()?;
    check_training(train)?;
    let mut params = MlpParams::init(train.dim(), spec.hidden_units, spec.init_seed);
    let mut flat = params.to_flat();
    let mut final_loss = None;
    for epoch in 0..spec.epochs {
        let (loss, grad) = mlp_loss_and_gradient(&params, &train.features, &train.labels);
        if !loss.is_finite() {
            return Err(FitError::NonFiniteLoss { iteration: epoch });
        }
        final_loss = Some(loss);
        for (p, g) in flat.iter_mut().zip(grad.to_flat()) {
            *p -= spec.learning_rate * g;
        }
        params = params.with_flat(&flat);
    }
    if flat.iter().any(|v| !v.is_finite()) {
        return Err(FitError::NonFiniteLoss {
            iteration: spec.epochs,
        });
    }
    Ok(MlpModel { params, final_loss })
}
