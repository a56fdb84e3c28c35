//! Objective-function contract: value, full gradient and block gradient,
//! plus optional curvature certificates (PL constant, Lipschitz constant,
//! optimal value) carried alongside the evaluators.
//!
//! Instances are immutable after construction and cheap to clone; the
//! evaluators are pure, so an instance can be shared freely across
//! concurrent evaluators.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::linalg::{self, SymMatrix};
use crate::partition::BlockPartition;
use crate::Result;

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// How a PL constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlProvenance {
    Analytic,
    RcDerived,
    Estimated,
}

/// Claim that the objective satisfies ½‖∇f(z)‖² ≥ μ·(f(z) − f*) everywhere.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PlCertificate {
    pub mu: f64,
    pub provenance: PlProvenance,
}

/// Parameters of the regularity condition
/// ⟨∇f(z), z−x*⟩ ≥ (1/α)‖∇f(z)‖² + (1/β)‖z−x*‖².
#[derive(Debug, Clone)]
pub struct RcParameters {
    pub alpha: f64,
    pub beta: f64,
    pub minimizer: Vec<f64>,
}

/// A differentiable objective with block-gradient access.
#[derive(Clone)]
pub struct ObjectiveInstance {
    dim: usize,
    name: String,
    value_fn: Arc<ValueFn>,
    grad_fn: Arc<GradFn>,
    pl: Option<PlCertificate>,
    lipschitz: Option<f64>,
    optimal_value: Option<f64>,
}

impl fmt::Debug for ObjectiveInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveInstance")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("pl", &self.pl)
            .field("lipschitz", &self.lipschitz)
            .field("optimal_value", &self.optimal_value)
            .finish()
    }
}

impl ObjectiveInstance {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value_fn: Arc<ValueFn>,
        grad_fn: Arc<GradFn>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidObjective("dimension must be positive".into()));
        }
        Ok(ObjectiveInstance {
            dim,
            name: name.into(),
            value_fn,
            grad_fn,
            pl: None,
            lipschitz: None,
            optimal_value: None,
        })
    }

    pub fn with_pl(mut self, cert: PlCertificate) -> Self {
        self.pl = Some(cert);
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_optimal_value(mut self, f_star: f64) -> Self {
        self.optimal_value = Some(f_star);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pl_certificate(&self) -> Option<PlCertificate> {
        self.pl
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn optimal_value(&self) -> Option<f64> {
        self.optimal_value
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// f(x). Pure; rejects inputs of the wrong dimension.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok((self.value_fn)(x))
    }

    /// ∇f(x).
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok((self.grad_fn)(x))
    }

    /// ∇_i f(x): the slice of the full gradient belonging to block `i`.
    ///
    /// Computed by evaluating the full gradient and slicing, so the
    /// concatenation over all blocks reproduces `gradient` bit for bit.
    pub fn block_gradient(&self, x: &[f64], block: usize, partition: &BlockPartition) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if partition.total_dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: partition.total_dim() });
        }
        let range = partition.range(block)?;
        let g = (self.grad_fn)(x);
        Ok(g[range].to_vec())
    }
}

/// Result of a sampled PL spot-check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PlCheckReport {
    /// min over usable points of ½‖∇f(z)‖² / (f(z) − f*).
    pub worst_ratio: f64,
    pub pass: bool,
    /// Points with f(z) − f* ≥ the gap floor.
    pub used: usize,
    /// Points skipped because the gap was below the floor.
    pub skipped: usize,
}

/// Gaps below this are considered "at the minimiser" and skipped to avoid 0/0.
pub const PL_GAP_FLOOR: f64 = 1e-12;
/// Absolute tolerance when comparing the sampled worst ratio against μ.
pub const PL_TOLERANCE: f64 = 1e-10;

/// Spot-check a PL certificate on the given points.
///
/// Requires the instance to carry its optimal value; callers must estimate
/// f* first when it is not analytic.
pub fn check_pl_at(obj: &ObjectiveInstance, cert: &PlCertificate, points: &[Vec<f64>]) -> Result<PlCheckReport> {
    let f_star = obj.optimal_value().ok_or_else(|| {
        Error::OptimalValueUnknown(format!(
            "objective '{}' has no optimal value; estimate f* before checking the PL inequality",
            obj.name()
        ))
    })?;
    if points.is_empty() {
        return Err(Error::Analysis("PL check requires a nonempty point set".into()));
    }
    let mut worst = f64::INFINITY;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for z in points {
        let gap = obj.value(z)? - f_star;
        if gap < PL_GAP_FLOOR {
            skipped += 1;
            continue;
        }
        let ratio = 0.5 * linalg::norm_sq(&obj.gradient(z)?) / gap;
        if ratio < worst {
            worst = ratio;
        }
        used += 1;
    }
    let pass = used > 0 && worst >= cert.mu - PL_TOLERANCE;
    Ok(PlCheckReport { worst_ratio: worst, pass, used, skipped })
}

/// Result of a sampled regularity-condition check. `inequality_*` refers to
/// the full two-term inequality; `gradient_bound_*` to its consequence
/// ‖∇f(z)‖ ≥ (1/β)‖z−x*‖, the step the PL conversion actually uses.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RcCheckReport {
    pub inequality_pass: bool,
    /// min over points of lhs − rhs for the full inequality.
    pub inequality_margin: f64,
    pub gradient_bound_pass: bool,
    /// min over points of ‖∇f(z)‖ − (1/β)‖z−x*‖.
    pub gradient_bound_margin: f64,
}

/// Spot-check RC(α, β) on the given points with the given tolerance.
pub fn check_rc_at(obj: &ObjectiveInstance, rc: &RcParameters, points: &[Vec<f64>], tol: f64) -> Result<RcCheckReport> {
    if rc.alpha <= 0.0 || rc.beta <= 0.0 {
        return Err(Error::InvalidObjective("RC parameters must be positive".into()));
    }
    if rc.minimizer.len() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), got: rc.minimizer.len() });
    }
    if points.is_empty() {
        return Err(Error::Analysis("RC check requires a nonempty point set".into()));
    }
    let mut ineq_margin = f64::INFINITY;
    let mut grad_margin = f64::INFINITY;
    for z in points {
        let g = obj.gradient(z)?;
        let d = linalg::sub(z, &rc.minimizer);
        let lhs = linalg::dot(&g, &d);
        let rhs = linalg::norm_sq(&g) / rc.alpha + linalg::norm_sq(&d) / rc.beta;
        ineq_margin = ineq_margin.min(lhs - rhs);
        grad_margin = grad_margin.min(linalg::norm(&g) - linalg::norm(&d) / rc.beta);
    }
    Ok(RcCheckReport {
        inequality_pass: ineq_margin >= -tol,
        inequality_margin: ineq_margin,
        gradient_bound_pass: grad_margin >= -tol,
        gradient_bound_margin: grad_margin,
    })
}

/// Convert an RC certificate into a PL certificate: RC(α, β) together with
/// an L-Lipschitz gradient gives the PL inequality with μ = 1/(β²L).
pub fn rc_to_pl(rc: &RcParameters, lipschitz: f64) -> Result<PlCertificate> {
    if lipschitz <= 0.0 {
        return Err(Error::InvalidObjective("Lipschitz constant must be positive".into()));
    }
    if rc.alpha <= 0.0 || rc.beta <= 0.0 {
        return Err(Error::InvalidObjective("RC parameters must be positive".into()));
    }
    Ok(PlCertificate { mu: 1.0 / (rc.beta * rc.beta * lipschitz), provenance: PlProvenance::RcDerived })
}

/// Central finite-difference gradient, used by the runtime check suites.
/// Test code carries its own copy so the oracle stays independent.
pub fn finite_difference_gradient(obj: &ObjectiveInstance, x: &[f64], step: f64) -> Result<Vec<f64>> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for k in 0..x.len() {
        let orig = xp[k];
        xp[k] = orig + step;
        let fp = obj.value(&xp)?;
        xp[k] = orig - step;
        let fm = obj.value(&xp)?;
        xp[k] = orig;
        g[k] = (fp - fm) / (2.0 * step);
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------------

/// f(x) = ½ Σ d_k x_k², with μ = min d, L = max d, f* = 0.
pub fn diagonal_quadratic(diag: Vec<f64>) -> Result<ObjectiveInstance> {
    if diag.is_empty() {
        return Err(Error::InvalidObjective("diagonal quadratic needs at least one coefficient".into()));
    }
    if diag.iter().any(|&d| d <= 0.0 || !d.is_finite()) {
        return Err(Error::InvalidObjective("diagonal quadratic coefficients must be positive".into()));
    }
    let dim = diag.len();
    let mu = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let l = diag.iter().cloned().fold(0.0, f64::max);
    let d_value = diag.clone();
    let d_grad = diag;
    let obj = ObjectiveInstance::new(
        "diag-quadratic",
        dim,
        Arc::new(move |x: &[f64]| 0.5 * x.iter().zip(&d_value).map(|(xi, di)| di * xi * xi).sum::<f64>()),
        Arc::new(move |x: &[f64]| x.iter().zip(&d_grad).map(|(xi, di)| di * xi).collect()),
    )?;
    Ok(obj
        .with_pl(PlCertificate { mu, provenance: PlProvenance::Analytic })
        .with_lipschitz(l)
        .with_optimal_value(0.0))
}

/// Separable sum of the non-convex PL example: f(x) = Σ (x_k² + 3 sin² x_k).
/// Each summand satisfies the PL inequality with μ = 1/32, and so does the
/// sum; the gradient is 8-Lipschitz.
pub fn pl_sine(dim: usize) -> Result<ObjectiveInstance> {
    if dim == 0 {
        return Err(Error::InvalidObjective("pl-sine needs a positive dimension".into()));
    }
    let obj = ObjectiveInstance::new(
        "pl-sine",
        dim,
        Arc::new(|x: &[f64]| x.iter().map(|&t| t * t + 3.0 * t.sin() * t.sin()).sum()),
        Arc::new(|x: &[f64]| x.iter().map(|&t| 2.0 * t + 3.0 * (2.0 * t).sin()).collect()),
    )?;
    Ok(obj
        .with_pl(PlCertificate { mu: 1.0 / 32.0, provenance: PlProvenance::Analytic })
        .with_lipschitz(8.0)
        .with_optimal_value(0.0))
}

/// f(x) = ½‖Ax − b‖² for a possibly rank-deficient A, with b required to lie
/// in range(A) so that f* = 0 is known and the PL certificate
/// μ = (smallest nonzero singular value)² is valid.
pub fn least_squares(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<ObjectiveInstance> {
    let n_rows = rows.len();
    if n_rows == 0 {
        return Err(Error::InvalidObjective("least squares needs at least one row".into()));
    }
    let dim = rows[0].len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidObjective("least-squares rows must be nonempty and of equal length".into()));
    }
    if rhs.len() != n_rows {
        return Err(Error::DimensionMismatch { expected: n_rows, got: rhs.len() });
    }

    // Gram matrix AᵀA and its spectrum.
    let mut gram = SymMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = rows.iter().map(|r| r[i] * r[j]).sum();
            gram.set(i, j, v);
            gram.set(j, i, v);
        }
    }
    let eigs = linalg::sym_eigenvalues(&gram);
    let sigma_max_sq = *eigs.last().unwrap();
    if sigma_max_sq <= 0.0 {
        return Err(Error::InvalidObjective("least-squares matrix is zero".into()));
    }
    let rank_tol = sigma_max_sq * 1e-12;
    let sigma_min_pos_sq = eigs
        .iter()
        .cloned()
        .filter(|&e| e > rank_tol)
        .fold(f64::INFINITY, f64::min);

    // Verify b ∈ range(A): minimise ½‖Ax−b‖² by gradient descent on the
    // normal equations and check the residual. With stepsize 1/σmax² this
    // contracts geometrically on range components.
    let atb: Vec<f64> = (0..dim).map(|j| rows.iter().zip(&rhs).map(|(r, b)| r[j] * b).sum()).collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        let ax: Vec<f64> = rows.iter().map(|r| linalg::dot(r, x)).collect();
        (0..dim).map(|j| rows.iter().zip(&ax).map(|(r, a)| r[j] * a).sum()).collect()
    };
    let mut x = vec![0.0; dim];
    let step = 1.0 / sigma_max_sq;
    let iters = 512 + (sigma_max_sq / sigma_min_pos_sq) as usize * 64;
    for _ in 0..iters.min(200_000) {
        let g: Vec<f64> = apply(&x).iter().zip(&atb).map(|(ax, b)| ax - b).collect();
        if linalg::norm_sq(&g) < 1e-28 * sigma_max_sq * sigma_max_sq {
            break;
        }
        linalg::axpy(-step, &g, &mut x);
    }
    let residual: f64 = rows
        .iter()
        .zip(&rhs)
        .map(|(r, b)| {
            let d = linalg::dot(r, &x) - b;
            d * d
        })
        .sum();
    let b_norm_sq: f64 = linalg::norm_sq(&rhs).max(1.0);
    if residual > 1e-16 * b_norm_sq {
        return Err(Error::InvalidObjective(
            "right-hand side lies outside range(A); f* on the solution set is not 0 and the PL certificate requires a known f*".into(),
        ));
    }

    let rows_v = Arc::new(rows);
    let rhs_v = Arc::new(rhs);
    let (rows_g, rhs_g) = (rows_v.clone(), rhs_v.clone());
    let obj = ObjectiveInstance::new(
        "least-squares",
        dim,
        Arc::new(move |x: &[f64]| {
            rows_v
                .iter()
                .zip(rhs_v.iter())
                .map(|(r, b)| {
                    let d = linalg::dot(r, x) - b;
                    0.5 * d * d
                })
                .sum()
        }),
        Arc::new(move |x: &[f64]| {
            let res: Vec<f64> = rows_g.iter().zip(rhs_g.iter()).map(|(r, b)| linalg::dot(r, x) - b).collect();
            (0..x.len()).map(|j| rows_g.iter().zip(&res).map(|(r, d)| r[j] * d).sum()).collect()
        }),
    )?;
    Ok(obj
        .with_pl(PlCertificate { mu: sigma_min_pos_sq, provenance: PlProvenance::Analytic })
        .with_lipschitz(sigma_max_sq)
        .with_optimal_value(0.0))
}
