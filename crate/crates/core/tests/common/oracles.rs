//! Independent reference computations used by the property and acceptance
//! tests. Nothing here calls into the code under test beyond plain data types.

use asdbench::matrix::Matrix;
use asdbench::metrics::ConfusionMatrix;
use asdbench::sampling::SeededRng;

/// Dual objective recomputed from scratch.
pub fn dual_value(gram: &Matrix, y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram.get(i, j);
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Completes the free multipliers with the last one from `sum a_i y_i = 0`,
/// or `None` when it falls outside `[0, c]`.
fn complete(free: &[f64], y: &[f64], c: f64) -> Option<Vec<f64>> {
    let n = y.len();
    let s: f64 = free.iter().zip(y).map(|(a, yi)| a * yi).sum();
    let last = -s * y[n - 1];
    if !(-1e-12..=c + 1e-12).contains(&last) {
        return None;
    }
    let mut a = free.to_vec();
    a.push(last.clamp(0.0, c));
    Some(a)
}

fn grid_points(lo: &[f64], hi: &[f64], steps: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for (l, h) in lo.iter().zip(hi) {
        let mut next = Vec::with_capacity(out.len() * (steps + 1));
        for p in &out {
            for s in 0..=steps {
                let mut q = p.clone();
                q.push(l + (h - l) * s as f64 / steps as f64);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Maximum of the box- and equality-constrained dual by exhaustive search
/// over the first `n - 1` multipliers: a coarse grid over `[0, c]^(n-1)`,
/// then repeated refinement around the incumbent until the grid step is
/// below `1e-7 * c`. Returns the best objective and multipliers.
pub fn grid_qp(gram: &Matrix, y: &[f64], c: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    assert!((2..=4).contains(&n));
    let m = n - 1;
    let coarse = match m {
        1 => 2000,
        2 => 200,
        _ => 60,
    };
    let fine = if m == 1 { 40 } else { 20 };
    let mut lo = vec![0.0; m];
    let mut hi = vec![c; m];
    let mut steps = coarse;
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    loop {
        for p in grid_points(&lo, &hi, steps) {
            if let Some(a) = complete(&p, y, c) {
                let v = dual_value(gram, y, &a);
                if v > best.0 {
                    best = (v, a);
                }
            }
        }
        let step = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (h - l) / steps as f64)
            .fold(0.0, f64::max);
        if step < 1e-7 * c {
            return best;
        }
        let radius = 5.0 * step;
        for k in 0..m {
            lo[k] = (best.1[k] - radius).max(0.0);
            hi[k] = (best.1[k] + radius).min(c);
        }
        steps = fine;
    }
}

/// Largest KKT residual of `(alpha, b)`: how far each `y_i f(x_i)` lies
/// outside the range its multiplier allows.
pub fn kkt_residual(gram: &Matrix, y: &[f64], alpha: &[f64], b: f64, c: f64) -> f64 {
    let n = y.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let f: f64 = (0..n).map(|j| alpha[j] * y[j] * gram.get(i, j)).sum::<f64>() + b;
        let m = y[i] * f;
        let r = if alpha[i] <= 0.0 {
            (1.0 - m).max(0.0)
        } else if alpha[i] >= c {
            (m - 1.0).max(0.0)
        } else {
            (m - 1.0).abs()
        };
        worst = worst.max(r);
    }
    worst
}

/// Central finite-difference gradient of `f` at `x`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            probe[k] = x[k] + step;
            let up = f(&probe);
            probe[k] = x[k] - step;
            let down = f(&probe);
            probe[k] = x[k];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// `max_k |a_k - n_k| / max(|a_k|, |n_k|, 1e-6)`.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
        .fold(0.0, f64::max)
}

/// Random matrix with entries uniform in `[-scale, scale]`.
pub fn random_matrix(rng: &mut SeededRng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.symmetric(scale)).collect();
    Matrix::from_vec(rows, cols, data)
}

/// Labels with both classes present.
pub fn random_labels(rng: &mut SeededRng, n: usize) -> Vec<u8> {
    loop {
        let y: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        if y.contains(&0) && y.contains(&1) {
            return y;
        }
    }
}

/// The row of a results table as a spreadsheet would compute it, cell by
/// cell from the four counts: accuracy, then precision, recall and F1 for
/// NO and for YES. Empty denominators give 0.
pub fn spreadsheet_row(cm: &ConfusionMatrix) -> [f64; 7] {
    let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let f1 = |p: f64, r: f64| if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    let (tp, tn, fp, fneg) = (cm.tp, cm.tn, cm.fp, cm.r#fn);
    let acc = div(tp + tn, tp + tn + fp + fneg);
    let p_no = div(tn, tn + fneg);
    let r_no = div(tn, tn + fp);
    let p_yes = div(tp, tp + fp);
    let r_yes = div(tp, tp + fneg);
    [acc, p_no, r_no, f1(p_no, r_no), p_yes, r_yes, f1(p_yes, r_yes)]
}

/// Pairwise AUC over rationals: concordant pairs count 2, ties 1.
pub fn pairwise_auc(scores: &[f64], truth: &[u8]) -> f64 {
    let mut num = 0u64;
    let mut pairs = 0u64;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if truth[i] == 1 && truth[j] == 0 {
                pairs += 1;
                num += match si.partial_cmp(&sj).unwrap() {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                };
            }
        }
    }
    num as f64 / (2 * pairs) as f64
}

/// Small SVM training problem with the kernel written out by hand.
pub struct SvmInstance {
    pub name: String,
    pub points: Vec<Vec<f64>>,
    /// Labels in {0, 1}.
    pub labels: Vec<u8>,
    pub kernel: asdbench::KernelSpec,
    pub c: f64,
}

impl SvmInstance {
    pub fn signed_labels(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect()
    }

    /// Gram matrix from the textbook kernel formulas.
    pub fn gram(&self) -> Matrix {
        use asdbench::KernelSpec;
        let n = self.points.len();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&self.points[i], &self.points[j]);
                let dot: f64 = a.iter().zip(b).map(|(u, v)| u * v).sum();
                let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                let k = match self.kernel {
                    KernelSpec::Linear => dot,
                    KernelSpec::Polynomial { degree, gamma, coef0 } => {
                        (gamma * dot + coef0).powi(degree as i32)
                    }
                    KernelSpec::Rbf { gamma } => (-gamma * d2).exp(),
                    KernelSpec::Sigmoid { gamma, coef0 } => (gamma * dot + coef0).tanh(),
                };
                g.set(i, j, k);
            }
        }
        g
    }
}

/// Every 2-, 3- and 4-point instance the SVM checks run on: hand-written
/// cases followed by seeded random ones with linear, polynomial and RBF
/// kernels over a range of `C`.
pub fn svm_corpus() -> Vec<SvmInstance> {
    use asdbench::KernelSpec;
    let mut out = vec![
        SvmInstance {
            name: "two points on a line".into(),
            points: vec![vec![1.0], vec![-1.0]],
            labels: vec![1, 0],
            kernel: KernelSpec::Linear,
            c: 10.0,
        },
        SvmInstance {
            name: "two points, rbf".into(),
            points: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            labels: vec![0, 1],
            kernel: KernelSpec::Rbf { gamma: 0.5 },
            c: 1.0,
        },
        SvmInstance {
            name: "three collinear points".into(),
            points: vec![vec![-2.0], vec![0.5], vec![2.0]],
            labels: vec![0, 1, 1],
            kernel: KernelSpec::Linear,
            c: 5.0,
        },
        SvmInstance {
            name: "three points, bound multipliers".into(),
            points: vec![vec![0.0, 0.0], vec![0.2, 0.1], vec![1.0, 1.0]],
            labels: vec![1, 0, 1],
            kernel: KernelSpec::Linear,
            c: 0.1,
        },
        SvmInstance {
            name: "xor".into(),
            points: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]],
            labels: vec![0, 0, 1, 1],
            kernel: KernelSpec::Rbf { gamma: 1.0 },
            c: 100.0,
        },
        SvmInstance {
            name: "four points, overlapping classes".into(),
            points: vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            labels: vec![0, 1, 0, 1],
            kernel: KernelSpec::Linear,
            c: 1.0,
        },
        SvmInstance {
            name: "four points, cubic kernel".into(),
            points: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.5], vec![0.3, -1.0]],
            labels: vec![1, 0, 1, 0],
            kernel: KernelSpec::Polynomial {
                degree: 3,
                gamma: 0.5,
                coef0: 1.0,
            },
            c: 2.0,
        },
    ];
    let mut rng = SeededRng::new(20_240);
    for n in 2..=4 {
        for k in 0..8 {
            let dim = 1 + rng.below(3) as usize;
            let points = (0..n)
                .map(|_| (0..dim).map(|_| rng.symmetric(2.0)).collect())
                .collect();
            let labels = random_labels(&mut rng, n);
            let kernel = match k % 3 {
                0 => KernelSpec::Linear,
                1 => KernelSpec::Rbf {
                    gamma: 0.2 + rng.unit(),
                },
                _ => KernelSpec::Polynomial {
                    degree: 2,
                    gamma: 0.5,
                    coef0: 1.0,
                },
            };
            let c = [0.05, 0.5, 1.0, 10.0][k % 4];
            out.push(SvmInstance {
                name: format!("random n={n} #{k}"),
                points,
                labels,
                kernel,
                c,
            });
        }
    }
    out
}
