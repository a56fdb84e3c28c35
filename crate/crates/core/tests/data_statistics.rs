//! Statistical sanity of the synthetic generator: zero separation carries no
//! signal (held-out accuracy ≈ chance), wide separation is linearly
//! separable.

use std::sync::Arc;

use abcd_core::data::{generate_synthetic, Dataset};
use abcd_core::linalg;
use abcd_core::logistic::{sigmoid, LogisticModel};

/// Plain gradient-descent fit, written here so the check does not lean on
/// the estimator under test.
fn fit(model: &LogisticModel, dim: usize, iters: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    let step = 1.0 / model.lipschitz();
    for _ in 0..iters {
        let g = model.gradient(&x);
        for (xk, gk) in x.iter_mut().zip(&g) {
            *xk -= step * gk;
        }
    }
    x
}

fn accuracy(w: &[f64], data: &Dataset) -> f64 {
    let mut correct = 0usize;
    for k in 0..data.n_samples() {
        let p = sigmoid(linalg::dot(w, data.row(k)));
        let label = u8::from(p >= 0.5);
        if label == data.label(k) {
            correct += 1;
        }
    }
    correct as f64 / data.n_samples() as f64
}

#[test]
fn zero_separation_gives_chance_accuracy() {
    let mut accs = Vec::new();
    for seed in 0..50u64 {
        let train = generate_synthetic(100, 5, 0.0, 1000 + seed).unwrap();
        let test = generate_synthetic(400, 5, 0.0, 5000 + seed).unwrap();
        let model = LogisticModel::new(Arc::new(train), 0.01).unwrap();
        let w = fit(&model, 5, 300);
        let acc = accuracy(&w, &test);
        assert!((acc - 0.5).abs() <= 0.15, "seed {seed}: held-out accuracy {acc}");
        accs.push(acc);
    }
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    assert!((mean - 0.5).abs() <= 0.05, "mean accuracy {mean} should hover at chance");
}

#[test]
fn wide_separation_fits_cleanly() {
    let train = generate_synthetic(100, 5, 10.0, 7).unwrap();
    let model = LogisticModel::new(Arc::new(train.clone()), 0.01).unwrap();
    let w = fit(&model, 5, 500);
    assert!(accuracy(&w, &train) >= 0.99);
}
