mod common;

use asdbench::classifiers::{logistic_loss_and_gradient, mlp_loss_and_gradient, MlpParams};
use asdbench::sampling::SeededRng;

use common::checks::{logistic_gradient_error, mlp_gradient_error};
use common::oracles::{central_difference, max_relative_error, random_labels, random_matrix};

#[test]
fn logistic_gradient_matches_finite_differences() {
    let e = logistic_gradient_error();
    assert!(e < 1e-4, "max relative error {e}");
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    let e = mlp_gradient_error();
    assert!(e < 1e-4, "max relative error {e}");
}

#[test]
fn mlp_gradient_at_initialisation() {
    let mut rng = SeededRng::new(5);
    let x = random_matrix(&mut rng, 8, 5, 1.0);
    let y = random_labels(&mut rng, 8);
    let params = MlpParams::init(5, 4, 9);
    let flat = params.to_flat();
    let analytic = mlp_loss_and_gradient(&params, &x, &y).1.to_flat();
    let numeric = central_difference(|t| mlp_loss_and_gradient(&params.with_flat(t), &x, &y).0, &flat, 1e-5);
    assert!(max_relative_error(&analytic, &numeric) < 1e-4);
}

#[test]
fn logistic_loss_at_zero_is_ln_two() {
    let mut rng = SeededRng::new(6);
    let x = random_matrix(&mut rng, 10, 3, 1.0);
    let y = random_labels(&mut rng, 10);
    let (loss, _, _) = logistic_loss_and_gradient(&x, &y, &[0.0; 3], 0.0, 0.3);
    assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
}
