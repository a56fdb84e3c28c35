//! Seeded point sampling used by the certificate spot-checks and test grids.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` points drawn uniformly from the box [-half_width, half_width]^dim.
pub fn sample_box(dim: usize, count: usize, half_width: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-half_width..half_width)).collect())
        .collect()
}

/// `count` points drawn uniformly from the Euclidean ball of given radius.
pub fn sample_ball(dim: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let g: Vec<f64> = standard_normal_vector(dim, &mut rng);
            let n = crate::linalg::norm(&g).max(1e-300);
            let u: f64 = rng.random::<f64>();
            let r = radius * u.powf(1.0 / dim as f64);
            g.into_iter().map(|x| x * r / n).collect()
        })
        .collect()
}

/// Evenly spaced grid over [lo, hi] (inclusive endpoints), one dimension.
pub fn grid_1d(lo: f64, hi: f64, count: usize) -> Vec<Vec<f64>> {
    assert!(count >= 2);
    let step = (hi - lo) / (count as f64 - 1.0);
    (0..count).map(|k| vec![lo + step * k as f64]).collect()
}

/// Standard normal draws via Box-Muller on the given generator. Self-owned
/// so the byte stream stays pinned by this crate rather than a distribution
/// crate's internals.
pub fn standard_normal_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim);
    while out.len() < dim {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        out.push(r * c);
        if out.len() < dim {
            out.push(r * s);
        }
    }
    out
}

/// Gaussian vector with the given scale, seeded independently of other draws.
pub fn gaussian_point(dim: usize, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    standard_normal_vector(dim, &mut rng).into_iter().map(|x| x * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_box(3, 5, 2.0, 42), sample_box(3, 5, 2.0, 42));
        assert_eq!(sample_ball(4, 5, 1.5, 7), sample_ball(4, 5, 1.5, 7));
        assert_eq!(gaussian_point(6, 1.0, 9), gaussian_point(6, 1.0, 9));
    }

    #[test]
    fn ball_points_stay_inside() {
        for p in sample_ball(5, 200, 3.0, 11) {
            assert!(crate::linalg::norm(&p) <= 3.0 + 1e-12);
        }
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = grid_1d(-10.0, 10.0, 10_000);
        assert_eq!(g.len(), 10_000);
        assert_eq!(g[0][0], -10.0);
        assert_eq!(g[9999][0], 10.0);
    }
}
