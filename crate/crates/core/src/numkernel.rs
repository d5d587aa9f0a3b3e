//! SVM kernel functions and Gram matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{dot, squared_distance, Matrix};

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("non-finite input or kernel value")]
    NonFinite,
    #[error("invalid kernel parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Linear,
    Polynomial { degree: u32, gamma: f64, coef0: f64 },
    Rbf { gamma: f64 },
    Sigmoid { gamma: f64, coef0: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        let bad = |m: &str| Err(KernelError::InvalidParameters(m.to_string()));
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { degree, gamma, coef0 } => {
                if degree < 1 {
                    bad("polynomial degree must be at least 1")
                } else if !(gamma > 0.0 && gamma.is_finite()) {
                    bad("gamma must be positive")
                } else if !coef0.is_finite() {
                    bad("coef0 must be finite")
                } else {
                    Ok(())
                }
            }
            KernelSpec::Rbf { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    bad("gamma must be positive")
                }
            }
            KernelSpec::Sigmoid { gamma, coef0 } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    bad("gamma must be positive")
                } else if !coef0.is_finite() {
                    bad("coef0 must be finite")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Display name used in the kernel comparison table.
    pub fn family_name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "Linear",
            KernelSpec::Polynomial { .. } => "Polynomial",
            KernelSpec::Rbf { .. } => "Gaussian",
            KernelSpec::Sigmoid { .. } => "Sigmoid",
        }
    }

    /// Unchecked evaluation; callers guarantee equal lengths.
    #[inline]
    pub(crate) fn apply(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree, gamma, coef0 } => {
                (gamma * dot(x, y) + coef0).powi(degree as i32)
            }
            KernelSpec::Rbf { gamma } => (-gamma * squared_distance(x, y)).exp(),
            KernelSpec::Sigmoid { gamma, coef0 } => (gamma * dot(x, y) + coef0).tanh(),
        }
    }
}

/// Degree 3, gamma `1/d`, coef0 1.
pub fn default_polynomial(d: usize) -> KernelSpec {
    KernelSpec::Polynomial {
        degree: 3,
        gamma: inverse_dim(d),
        coef0: 1.0,
    }
}

/// Gamma `1/d`, coef0 0.
pub fn default_sigmoid(d: usize) -> KernelSpec {
    KernelSpec::Sigmoid {
        gamma: inverse_dim(d),
        coef0: 0.0,
    }
}

/// Gamma `1 / (d * mean column variance)`, falling back to 1 when the
/// training matrix has no variance at all.
pub fn scale_gamma(x: &Matrix) -> f64 {
    let d = x.cols();
    let n = x.rows();
    if d == 0 || n == 0 {
        return 1.0;
    }
    let mut total_var = 0.0;
    for j in 0..d {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        total_var += col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    }
    let mean_var = total_var / d as f64;
    if mean_var > 0.0 {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0
    }
}

fn inverse_dim(d: usize) -> f64 {
    1.0 / d.max(1) as f64
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
    if x.len() != y.len() {
        return Err(KernelError::DimensionMismatch(x.len(), y.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(KernelError::NonFinite);
    }
    let k = spec.apply(x, y);
    if k.is_finite() {
        Ok(k)
    } else {
        Err(KernelError::NonFinite)
    }
}

/// Full `n x n` Gram matrix. The upper triangle is computed and mirrored, so
/// the result is exactly symmetric.
pub fn gram_matrix(spec: &KernelSpec, x: &Matrix) -> Result<Matrix, KernelError> {
    let n = x.rows();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        let xi = x.row(i);
        for j in i..n {
            let k = spec.apply(xi, x.row(j));
            if !k.is_finite() {
                return Err(KernelError::NonFinite);
            }
            g.set(i, j, k);
            g.set(j, i, k);
        }
    }
    Ok(g)
}
