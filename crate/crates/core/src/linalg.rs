//! Small dense vector/matrix helpers. Everything works on plain `f64`
//! slices; nothing here allocates unless it returns a new vector.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// y <- y + alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Dense symmetric matrix in row-major storage.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }
}

/// All eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// returned in ascending order. Intended for the desk-scale matrices that
/// back the built-in objectives (m up to a few hundred).
pub fn sym_eigenvalues(mat: &SymMatrix) -> Vec<f64> {
    let n = mat.dim;
    if n == 0 {
        return Vec::new();
    }
    let mut a = mat.data.clone();
    let idx = |i: usize, j: usize| i * n + j;
    let scale: f64 = a.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[idx(i, j)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Largest eigenvalue of a symmetric positive semidefinite operator given as
/// a matrix-vector product, by power iteration with a fixed deterministic
/// start vector.
pub fn power_iteration(dim: usize, iters: usize, tol: f64, apply: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    // Deterministic start with all modes excited.
    let mut v: Vec<f64> = (0..dim).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    let nv = norm(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }
    let mut lambda = 0.0f64;
    for _ in 0..iters {
        let w = apply(&v);
        let nw = norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let next = dot(&v, &w);
        let rel = (next - lambda).abs() / next.abs().max(1e-300);
        lambda = next;
        v = w.into_iter().map(|x| x / nw).collect();
        if rel < tol {
            break;
        }
    }
    lambda
}
