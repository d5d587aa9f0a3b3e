use serde::{Deserialize, Serialize};

use super::{check_training, FitError, KnnSpec};
use crate::ingest::Dataset;
use crate::matrix::{squared_distance, Matrix};

/// Lazy learner: keeps the training rows as given (the runner passes
/// standardised features).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub features: Matrix,
    pub labels: Vec<u8>,
}

pub fn fit_knn(train: &Dataset, spec: &KnnSpec) -> Result<KnnModel, FitError> {
    spec.validate()?;
    check_training(train)?;
    if spec.k > train.len() {
        return Err(FitError::KTooLarge {
            k: spec.k,
            n: train.len(),
        });
    }
    Ok(KnnModel {
        k: spec.k,
        features: train.features.clone(),
        labels: train.labels.clone(),
    })
}

impl KnnModel {
    /// Indices of the `k` nearest rows by Euclidean distance; equal
    /// distances go to the lower row index.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .features
            .iter_rows()
            .enumerate()
            .map(|(i, row)| (squared_distance(row, x), i))
            .collect();
        let by = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by);
            dist.truncate(self.k);
        }
        dist.sort_by(by);
        dist.into_iter().map(|(_, i)| i).collect()
    }

    /// Fraction of positive labels among the neighbours.
    pub fn score(&self, x: &[f64]) -> f64 {
        let pos = self
            .neighbours(x)
            .into_iter()
            .filter(|&i| self.labels[i] == 1)
            .count();
        pos as f64 / self.k as f64
    }
}
