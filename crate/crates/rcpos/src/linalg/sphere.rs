use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{CMatrix, LinalgError};

/// Draws `count` points uniformly from the unit sphere of C^dim.
///
/// Componentwise complex Gaussians normalized to unit length give the uniform
/// distribution on the sphere. The stream is fully determined by `seed`, so
/// sweeps can re-derive the exact sample set from a report.
pub fn sample_unit_sphere(dim: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    assert!(dim > 0, "sphere dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        out.push(v.into_iter().map(|z| z / norm).collect());
    }
    out
}

/// A vector normalized to unit length, optionally with respect to a
/// Hermitian metric.
#[derive(Clone, Debug)]
pub struct UnitVector {
    components: Vec<Complex64>,
}

impl UnitVector {
    /// Normalizes `v` so that v^t g conj(v) = 1 in the given metric (identity
    /// when absent), the same pairing the curvature tensors use.
    pub fn new(v: &[Complex64], metric: Option<&CMatrix>) -> Result<Self, LinalgError> {
        let norm_sq = match metric {
            None => v.iter().map(|z| z.norm_sqr()).sum::<f64>(),
            Some(g) => {
                assert_eq!(g.rows(), v.len());
                let vbar: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
                let gvbar = g.mul_vec(&vbar);
                v.iter().zip(gvbar.iter()).map(|(vi, gi)| (vi * gi).re).sum::<f64>()
            }
        };
        if !(norm_sq > 1e-24) {
            return Err(LinalgError::ZeroVector { norm: norm_sq.max(0.0).sqrt() });
        }
        let inv = 1.0 / norm_sq.sqrt();
        Ok(UnitVector { components: v.iter().map(|z| z * inv).collect() })
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// Standard Hermitian inner product <u, v> = sum conj(u_i) v_i.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
