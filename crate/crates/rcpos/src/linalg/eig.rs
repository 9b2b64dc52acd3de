use num_complex::Complex64;

use super::{CMatrix, LinalgError};
use crate::tol::Tolerances;

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascend; `vectors`
/// holds the matching eigenvectors as columns and is unitary.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    /// Frobenius residual of V diag(values) V^* against the input, relative
    /// to the input norm.
    pub residual: f64,
}

fn offdiag_frobenius(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation combines a phase factor that makes the targeted off-diagonal
/// entry real with the classical symmetric Jacobi angle (Rutishauser's stable
/// form of the tangent). Dimensions here are tiny, so quadratic convergence
/// of the cyclic sweep is reached within a handful of passes.
pub fn hermitian_eig(m: &CMatrix, tol: &Tolerances) -> Result<HermitianEigen, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let residual = m.hermitian_residual();
    if residual > tol.hermitian {
        return Err(LinalgError::NotHermitian { residual });
    }
    let n = m.rows();
    let scale = m.frobenius();
    let mut a = m.hermitianize();
    let mut v = CMatrix::identity(n);
    if n <= 1 || scale == 0.0 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(HermitianEigen { values, vectors: v, residual: 0.0 });
    }

    let target = tol.eig_offdiag * scale;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < tol.eig_max_sweeps {
        if offdiag_frobenius(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Unitary 2x2 block: diag(1, e^{-i phi}) followed by the real
                // rotation; phi is the phase of a_pq.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = -s * phase.conj();
                let u_qq = c * phase.conj();

                // A <- U^* A U, acting only on rows/columns p and q.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
        sweeps += 1;
    }
    if !converged && offdiag_frobenius(&a) > target {
        return Err(LinalgError::NoConvergence { sweeps, offdiag: offdiag_frobenius(&a) / scale });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.partial_cmp(&a[(y, y)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    // Verify the decomposition before handing it out.
    let mut recon = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += vectors[(i, k)] * values[k] * vectors[(j, k)].conj();
            }
            recon[(i, j)] = acc;
        }
    }
    let rec_res = recon.sub(m).frobenius() / scale.max(1e-300);
    if rec_res > tol.eig_residual {
        return Err(LinalgError::NoConvergence { sweeps, offdiag: rec_res });
    }
    Ok(HermitianEigen { values, vectors, residual: rec_res })
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Counts of eigenvalue signs, with a zero band proportional to the scale of
/// the spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignCounts {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

/// Transform with T^t g conj(T) = I, built from the eigendecomposition of a
/// Hermitian positive definite metric.
///
/// The congruence convention matches the tensor pairing `v^t g conj(v)`, so
/// `u -> T u` carries Euclidean unit vectors to g-unit vectors and feeding T
/// to the tensor transforms reduces g to the identity. Note the conjugate:
/// the columns of conj(T) are the unit eigenvectors over sqrt(eigenvalue).
pub fn metric_orthonormal_frame(g: &CMatrix, tol: &Tolerances) -> Result<CMatrix, LinalgError> {
    let eig = hermitian_eig(g, tol)?;
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let n = g.rows();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= tol.frame_pivot * scale {
            return Err(LinalgError::NotPositiveDefinite { pivot: lam, step: k });
        }
    }
    let mut t = eig.vectors.conj();
    for j in 0..n {
        let f = 1.0 / eig.values[j].sqrt();
        for i in 0..n {
            t[(i, j)] *= f;
        }
    }
    Ok(t)
}

/// Sign counts of the Hermitian form `m` measured against the Hermitian
/// positive definite metric `g` (generalized eigenvalue signs).
pub fn generalized_sign_counts(
    m: &CMatrix,
    g: &CMatrix,
    tol: &Tolerances,
) -> Result<(SignCounts, Vec<f64>), LinalgError> {
    if m.rows() != g.rows() || m.cols() != g.cols() {
        return Err(LinalgError::Dimension {
            context: format!("form is {}x{}, metric is {}x{}", m.rows(), m.cols(), g.rows(), g.cols()),
        });
    }
    let t = metric_orthonormal_frame(g, tol)?;
    let reduced = t.transpose().matmul(m).matmul(&t.conj()).hermitianize();
    let eig = hermitian_eig(&reduced, tol)?;
    let band = tol.zero_band * reduced.frobenius().max(0.0);
    let mut counts = SignCounts { positive: 0, zero: 0, negative: 0 };
    for &lam in &eig.values {
        if lam > band {
            counts.positive += 1;
        } else if lam < -band {
            counts.negative += 1;
        } else {
            counts.zero += 1;
        }
    }
    Ok((counts, eig.values))
}
