//! Soft-margin kernel SVM trained by sequential minimal optimisation.
//!
//! The dual `max sum(a) - 1/2 sum a_i a_j y_i y_j K_ij` subject to
//! `0 <= a_i <= C` and `sum a_i y_i = 0` is solved one multiplier pair at a
//! time. A pass walks the multipliers in index order; each one violating the
//! KKT conditions by more than `tol` is paired with the partner maximising
//! `|E_i - E_j|` (falling back to the remaining partners in index order when
//! that pair makes no progress). After every pass the bias is reset to the
//! average over non-bound support vectors, and training stops after
//! `max_passes` consecutive passes without an update.

use serde::{Deserialize, Serialize};

use super::{check_two_classes, FitError, SvmSpec};
use crate::ingest::Dataset;
use crate::matrix::Matrix;
use crate::numkernel::{gram_matrix, KernelSpec};

pub const DEFAULT_PASS_CAP: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub passes: usize,
    pub updates: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmDiagnostics {
    pub passes: usize,
    pub updates: usize,
    /// `false` when the pass cap was hit first.
    pub converged: bool,
    pub dual_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub dim: usize,
    pub kernel: KernelSpec,
    /// `alpha_i * y_i` per support vector.
    pub coefficients: Vec<f64>,
    pub support_vectors: Matrix,
    pub bias: f64,
    pub diagnostics: SvmDiagnostics,
}

impl SvmModel {
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(self.support_vectors.iter_rows())
            .map(|(c, sv)| c * self.kernel.apply(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

/// `sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij`.
pub fn dual_objective(gram: &Matrix, y: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram.get(i, j);
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

struct Smo<'a> {
    k: &'a Matrix,
    y: &'a [f64],
    c: f64,
    eps: f64,
    alpha: Vec<f64>,
    // sum_j a_j y_j K_ij, without the bias
    g: Vec<f64>,
    b: f64,
}

impl Smo<'_> {
    fn error(&self, i: usize) -> f64 {
        self.g[i] + self.b - self.y[i]
    }

    fn clip(&self, a: f64) -> f64 {
        let snap = 1e-12 * self.c;
        if a < snap {
            0.0
        } else if a > self.c - snap {
            self.c
        } else {
            a
        }
    }

    fn take_step(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (a1, a2) = (self.alpha[i], self.alpha[j]);
        let (y1, y2) = (self.y[i], self.y[j]);
        let (e1, e2) = (self.error(i), self.error(j));
        let s = y1 * y2;
        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (self.c + a2 - a1).min(self.c))
        } else {
            ((a1 + a2 - self.c).max(0.0), (a1 + a2).min(self.c))
        };
        if hi - lo <= 1e-12 * self.c {
            return false;
        }
        let k11 = self.k.get(i, i);
        let k12 = self.k.get(i, j);
        let k22 = self.k.get(j, j);
        let eta = k11 + k22 - 2.0 * k12;

        let mut a2_new = if eta > 0.0 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // objective is not strictly concave along the pair; take the better end
            let f1 = y1 * (self.g[i] - y1) - a1 * k11 - s * a2 * k12;
            let f2 = y2 * (self.g[j] - y2) - s * a1 * k12 - a2 * k22;
            let at = |a2v: f64| {
                let a1v = a1 + s * (a2 - a2v);
                a1v * f1 + a2v * f2 + 0.5 * a1v * a1v * k11 + 0.5 * a2v * a2v * k22
                    + s * a1v * a2v * k12
            };
            let (lobj, hobj) = (at(lo), at(hi));
            if lobj < hobj - self.eps {
                lo
            } else if lobj > hobj + self.eps {
                hi
            } else {
                a2
            }
        };
        a2_new = self.clip(a2_new);
        if (a2_new - a2).abs() < self.eps * (a2_new + a2 + self.eps) {
            return false;
        }
        let a1_new = self.clip(a1 + s * (a2 - a2_new));

        let d1 = (a1_new - a1) * y1;
        let d2 = (a2_new - a2) * y2;
        for (t, g) in self.g.iter_mut().enumerate() {
            *g += d1 * self.k.get(i, t) + d2 * self.k.get(j, t);
        }
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        self.b = if a1_new > 0.0 && a1_new < self.c {
            b1
        } else if a2_new > 0.0 && a2_new < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        self.alpha[i] = a1_new;
        self.alpha[j] = a2_new;
        true
    }

    fn violates(&self, i: usize, tol: f64) -> bool {
        let r = self.error(i) * self.y[i];
        (r < -tol && self.alpha[i] < self.c) || (r > tol && self.alpha[i] > 0.0)
    }

    /// Average of `y_i - g_i` over non-bound multipliers; with none, the
    /// midpoint of the interval the bound multipliers allow.
    fn settle_bias(&mut self) {
        let mut sum = 0.0;
        let mut count = 0usize;
        let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..self.alpha.len() {
            let a = self.alpha[i];
            let target = self.y[i] - self.g[i];
            if a > 0.0 && a < self.c {
                sum += target;
                count += 1;
            } else if (a == 0.0) == (self.y[i] > 0.0) {
                lower = lower.max(target);
            } else {
                upper = upper.min(target);
            }
        }
        self.b = if count > 0 {
            sum / count as f64
        } else {
            match (lower.is_finite(), upper.is_finite()) {
                (true, true) => (lower + upper) / 2.0,
                (true, false) => lower,
                (false, true) => upper,
                (false, false) => 0.0,
            }
        };
    }
}

/// Runs SMO on a precomputed Gram matrix with labels in {-1, +1}.
pub fn solve_smo(gram: &Matrix, y: &[f64], spec: &SvmSpec) -> SmoSolution {
    let n = y.len();
    let mut smo = Smo {
        k: gram,
        y,
        c: spec.c,
        eps: spec.eps,
        alpha: vec![0.0; n],
        g: vec![0.0; n],
        b: 0.0,
    };
    let mut quiet = 0;
    let mut passes = 0;
    let mut updates = 0;
    while quiet < spec.max_passes && passes < spec.pass_cap {
        let mut changed = 0;
        for i in 0..n {
            if !smo.violates(i, spec.tol) {
                continue;
            }
            let ei = smo.error(i);
            let mut best = None;
            let mut best_gap = f64::NEG_INFINITY;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let gap = (ei - smo.error(j)).abs();
                if gap > best_gap {
                    best_gap = gap;
                    best = Some(j);
                }
            }
            let Some(j) = best else { continue };
            if smo.take_step(i, j) || (0..n).any(|t| t != j && smo.take_step(i, t)) {
                changed += 1;
            }
        }
        passes += 1;
        updates += changed;
        smo.settle_bias();
        if changed == 0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
    }
    SmoSolution {
        converged: quiet >= spec.max_passes,
        alpha: smo.alpha,
        bias: smo.b,
        passes,
        updates,
    }
}

pub fn fit_svm(train: &Dataset, spec: &SvmSpec) -> Result<SvmModel, FitError> {
    spec.validate()?;
    check_two_classes(train)?;
    let gram = gram_matrix(&spec.kernel, &train.features)?;
    let y: Vec<f64> = train
        .labels
        .iter()
        .map(|&l| if l == 1 { 1.0 } else { -1.0 })
        .collect();
    let sol = solve_smo(&gram, &y, spec);
    let support: Vec<usize> = (0..y.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    Ok(SvmModel {
        dim: train.dim(),
        kernel: spec.kernel,
        coefficients: support.iter().map(|&i| sol.alpha[i] * y[i]).collect(),
        support_vectors: train.features.select_rows(&support),
        bias: sol.bias,
        diagnostics: SvmDiagnostics {
            passes: sol.passes,
            updates: sol.updates,
            converged: sol.converged,
            dual_objective: dual_objective(&gram, &y, &sol.alpha),
        },
    })
}
