use serde::{Deserialize, Serialize};

use super::{check_two_classes, FitError, NaiveBayesSpec};
use crate::ingest::Dataset;

const VAR_FLOOR: f64 = 1e-9;

/// Per-feature class-conditional likelihood. Index 0 is class NO, 1 is YES.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "likelihood", rename_all = "snake_case")]
pub enum NbColumn {
    /// `p_one[c]` = P(f = 1 | c).
    Bernoulli { p_one: [f64; 2] },
    Gaussian { mean: [f64; 2], var: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub priors: [f64; 2],
    pub columns: Vec<NbColumn>,
}

/// Bernoulli likelihoods with Laplace smoothing for 0/1 columns, Gaussian
/// for everything else.
pub fn fit_naive_bayes(train: &Dataset, spec: &NaiveBayesSpec) -> Result<NaiveBayesModel, FitError> {
    spec.validate()?;
    check_two_classes(train)?;
    let x = &train.features;
    let mut n_c = [0.0f64; 2];
    for &y in &train.labels {
        n_c[y as usize] += 1.0;
    }
    let n = train.len() as f64;
    let priors = [n_c[0] / n, n_c[1] / n];

    let columns = (0..x.cols())
        .map(|j| {
            let col = x.column(j);
            let binary = col.iter().all(|&v| v == 0.0 || v == 1.0);
            if binary {
                let mut ones = [0.0f64; 2];
                for (v, &y) in col.iter().zip(&train.labels) {
                    ones[y as usize] += v;
                }
                let p = |c: usize| (ones[c] + spec.alpha) / (n_c[c] + 2.0 * spec.alpha);
                NbColumn::Bernoulli { p_one: [p(0), p(1)] }
            } else {
                let mut sum = [0.0f64; 2];
                for (v, &y) in col.iter().zip(&train.labels) {
                    sum[y as usize] += v;
                }
                let mean = [sum[0] / n_c[0], sum[1] / n_c[1]];
                let mut ss = [0.0f64; 2];
                for (v, &y) in col.iter().zip(&train.labels) {
                    let c = y as usize;
                    ss[c] += (v - mean[c]) * (v - mean[c]);
                }
                let var = [
                    (ss[0] / n_c[0]).max(VAR_FLOOR),
                    (ss[1] / n_c[1]).max(VAR_FLOOR),
                ];
                NbColumn::Gaussian { mean, var }
            }
        })
        .collect();
    Ok(NaiveBayesModel { priors, columns })
}

impl NaiveBayesModel {
    fn log_joint(&self, x: &[f64]) -> [f64; 2] {
        let mut lj = [self.priors[0].ln(), self.priors[1].ln()];
        for (col, &v) in self.columns.iter().zip(x) {
            for (c, l) in lj.iter_mut().enumerate() {
                *l += match col {
                    NbColumn::Bernoulli { p_one } => {
                        v * p_one[c].ln() + (1.0 - v) * (1.0 - p_one[c]).ln()
                    }
                    NbColumn::Gaussian { mean, var } => {
                        let d = v - mean[c];
                        -0.5 * ((2.0 * std::f64::consts::PI * var[c]).ln() + d * d / var[c])
                    }
                };
            }
        }
        lj
    }

    /// Posterior P(YES | x).
    pub fn score(&self, x: &[f64]) -> f64 {
        let [l0, l1] = self.log_joint(x);
        crate::matrix::sigmoid(l1 - l0)
    }
}
