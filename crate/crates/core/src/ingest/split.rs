use serde::{Deserialize, Serialize};

use super::table::Dataset;
use super::IngestError;
use crate::matrix::Matrix;
use crate::sampling::SeededRng;

/// A seeded holdout partition. Indices refer to rows of the input dataset,
/// in post-shuffle order.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Shuffles rows with a Fisher-Yates pass driven by ChaCha8 seeded from
/// `seed`, then takes the first `floor(train_fraction * n)` as training rows.
pub fn split(data: &Dataset, train_fraction: f64, seed: u64) -> Result<Split, IngestError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(IngestError::InvalidFraction(train_fraction));
    }
    let n = data.len();
    if n < 2 {
        return Err(IngestError::TooFewRows { needed: 2, have: n });
    }
    // the epsilon absorbs products like 0.57 * 100 = 56.999999999999993
    let n_train = (train_fraction * n as f64 + 1e-9).floor() as usize;
    if n_train == 0 || n_train >= n {
        return Err(IngestError::EmptyPart {
            n,
            fraction: train_fraction,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    SeededRng::new(seed).shuffle(&mut order);
    let test_indices = order.split_off(n_train);
    let train_indices = order;
    Ok(Split {
        train: data.select(&train_indices),
        test: data.select(&test_indices),
        train_indices,
        test_indices,
    })
}

/// Per-column mean and population standard deviation of a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl ScalerParams {
    pub fn fit(x: &Matrix) -> Self {
        let n = x.rows() as f64;
        let d = x.cols();
        let mut means = vec![0.0; d];
        for row in x.iter_rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; d];
        for row in x.iter_rows() {
            for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        Self { means, stds }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// Standardises one row in place; zero-std columns become 0.
    pub fn apply_row(&self, row: &mut [f64]) {
        for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.stds) {
            *v = if *s > 0.0 { (*v - m) / s } else { 0.0 };
        }
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix, IngestError> {
        if x.cols() != self.dim() {
            return Err(IngestError::DimensionMismatch {
                expected: self.dim(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            self.apply_row(out.row_mut(i));
        }
        Ok(out)
    }
}

/// Standardises both splits with statistics from `train` only.
pub fn standardize(
    train: &Dataset,
    test: &Dataset,
) -> Result<(Dataset, Dataset, ScalerParams), IngestError> {
    if train.is_empty() {
        return Err(IngestError::TooFewRows { needed: 1, have: 0 });
    }
    if train.dim() != test.dim() {
        return Err(IngestError::DimensionMismatch {
            expected: train.dim(),
            got: test.dim(),
        });
    }
    let params = ScalerParams::fit(&train.features);
    let scaled = |d: &Dataset| -> Result<Dataset, IngestError> {
        Ok(Dataset {
            features: params.apply(&d.features)?,
            labels: d.labels.clone(),
            feature_names: d.feature_names.clone(),
        })
    };
    let train_s = scaled(train)?;
    let test_s = scaled(test)?;
    Ok((train_s, test_s, params))
}
