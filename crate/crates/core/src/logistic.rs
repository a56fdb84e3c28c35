//! ℓ2-regularised logistic regression over a [`Dataset`]:
//!
//!   E(x) = −(1/N) Σ_k [ y_k log h(x; z_k) + (1−y_k) log(1 − h(x; z_k)) ]
//!          + (λ/2N) ‖x‖²
//!
//! with the sigmoid hypothesis h(x; z) = 1/(1 + e^{−xᵀz}). The cross-entropy
//! is evaluated in branch form so nothing overflows for |xᵀz| up to several
//! hundred. For λ > 0 the objective is (λ/N)-strongly convex, hence
//! (λ/N)-PL, and the gradient is Lipschitz with
//! L = (¼‖Z‖²_op + λ)/N.

use std::sync::Arc;

use crate::data::Dataset;
use crate::error::Error;
use crate::linalg;
use crate::objective::{ObjectiveInstance, PlCertificate, PlProvenance};
use crate::Result;

/// Numerically stable sigmoid.
pub fn sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

/// Stable per-sample cross-entropy: −y log h − (1−y) log(1−h) at margin a.
fn cross_entropy(a: f64, y: f64) -> f64 {
    // max(a,0) − a·y + ln(1 + e^{−|a|})
    a.max(0.0) - a * y + (-a.abs()).exp().ln_1p()
}

/// The logistic model: dataset reference, regularisation weight and the
/// curvature constants derived from them.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    data: Arc<Dataset>,
    lambda: f64,
    lipschitz: f64,
    mu: Option<f64>,
}

/// Result of estimating f* by a long centralised descent run.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OptimumEstimate {
    pub f_star: f64,
    /// ‖∇E‖ at the returned point.
    pub grad_norm: f64,
    /// Certified bound on f(x̂) − f* from the PL inequality: ‖∇E‖²/(2μ).
    /// `None` when λ = 0 (no PL certificate to invoke).
    pub gap_bound: Option<f64>,
    pub iterations: usize,
}

impl LogisticModel {
    /// Build the model. Rejects empty datasets and negative λ.
    pub fn new(data: Arc<Dataset>, lambda: f64) -> Result<Self> {
        if data.n_samples() == 0 {
            return Err(Error::Dataset("logistic regression needs a nonempty dataset".into()));
        }
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::InvalidObjective(format!("lambda must be nonnegative, got {lambda}")));
        }
        let n = data.n_samples() as f64;
        // ‖Z‖²_op by power iteration on ZᵀZ (50 iterations, tol 1e-8).
        let dim = data.dim();
        let d = data.clone();
        let zt_z_op = linalg::power_iteration(dim, 50, 1e-8, move |v| {
            let mut out = vec![0.0; dim];
            for k in 0..d.n_samples() {
                let row = d.row(k);
                let p = linalg::dot(row, v);
                linalg::axpy(p, row, &mut out);
            }
            out
        });
        let lipschitz = (0.25 * zt_z_op + lambda) / n;
        let mu = (lambda > 0.0).then_some(lambda / n);
        Ok(LogisticModel { data, lambda, lipschitz, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.data
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let n = self.data.n_samples() as f64;
        let mut total = 0.0;
        for k in 0..self.data.n_samples() {
            let a = linalg::dot(self.data.row(k), x);
            total += cross_entropy(a, self.data.label(k) as f64);
        }
        total / n + 0.5 * self.lambda / n * linalg::norm_sq(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.data.n_samples() as f64;
        let mut g = vec![0.0; x.len()];
        for k in 0..self.data.n_samples() {
            let row = self.data.row(k);
            let a = linalg::dot(row, x);
            let r = sigmoid(a) - self.data.label(k) as f64;
            linalg::axpy(r, row, &mut g);
        }
        let scale = 1.0 / n;
        let reg = self.lambda / n;
        for (gj, xj) in g.iter_mut().zip(x) {
            *gj = *gj * scale + reg * xj;
        }
        g
    }

    /// Estimate f* by centralised gradient descent with stepsize 1/L until
    /// ‖∇E‖ ≤ `grad_tol` (or `max_iters`). The returned gap bound comes from
    /// the PL inequality itself.
    pub fn estimate_optimum(&self, grad_tol: f64, max_iters: usize) -> OptimumEstimate {
        let dim = self.data.dim();
        let mut x = vec![0.0; dim];
        let step = 1.0 / self.lipschitz;
        let mut grad_norm = f64::INFINITY;
        let mut iters = 0usize;
        for t in 0..max_iters {
            let g = self.gradient(&x);
            grad_norm = linalg::norm(&g);
            iters = t;
            if grad_norm <= grad_tol {
                break;
            }
            linalg::axpy(-step, &g, &mut x);
        }
        let f_star = self.value(&x);
        let gap_bound = self.mu.map(|mu| grad_norm * grad_norm / (2.0 * mu));
        OptimumEstimate { f_star, grad_norm, gap_bound, iterations: iters }
    }

    /// Package the model as an [`ObjectiveInstance`]. The PL certificate
    /// μ = λ/N is attached when λ > 0; `f_star` (from
    /// [`LogisticModel::estimate_optimum`]) is attached when given.
    pub fn objective(&self, f_star: Option<f64>) -> ObjectiveInstance {
        let value_model = self.clone();
        let grad_model = self.clone();
        let mut obj = ObjectiveInstance::new(
            "logistic-l2",
            self.data.dim(),
            Arc::new(move |x: &[f64]| value_model.value(x)),
            Arc::new(move |x: &[f64]| grad_model.gradient(x)),
        )
        .expect("dataset dimension is positive")
        .with_lipschitz(self.lipschitz);
        if let Some(mu) = self.mu {
            obj = obj.with_pl(PlCertificate { mu, provenance: PlProvenance::Analytic });
        }
        if let Some(fs) = f_star {
            obj = obj.with_optimal_value(fs);
        }
        obj
    }
}

/// Convenience constructor matching the catalog entry: build the model and
/// the objective in one step, estimating f* when requested.
pub fn make_logistic(data: Arc<Dataset>, lambda: f64, estimate_f_star: bool) -> Result<(LogisticModel, ObjectiveInstance)> {
    let model = LogisticModel::new(data, lambda)?;
    let f_star = if estimate_f_star {
        Some(model.estimate_optimum(1e-10, 200_000).f_star)
    } else {
        None
    };
    let obj = model.objective(f_star);
    Ok((model, obj))
}
