//! Subbundle and quotient curvature through a flag-preserving gauge.
//!
//! The split is always "first s frame vectors" versus the rest; callers
//! permute their index set to the front beforehand. The Cholesky factor of
//! the metric value gives an upper-triangular frame change, so the flag
//! spanned by the leading vectors is preserved while the metric at the point
//! becomes the identity. In that gauge two identities hold exactly at the
//! point, not merely to leading order:
//!
//!   restriction minus subbundle curvature  =  sum over the complement of
//!       (d_i H')_{a c} (dbar_j H')_{c b},
//!   quotient minus restriction             =  (dbar_j C)(d_i B),
//!
//! with B and C the off-diagonal jet blocks. Both right-hand sides are Gram
//! products, which is the mechanism behind "curvature decreases in
//! subbundles, increases in quotients". The residuals stored here measure how
//! far the computed tensors are from those identities and should sit at
//! roundoff level; they are the advertised cross-check.

use num_complex::Complex64;

use crate::curvature::{curvature_of_jets, CurvaturePoint};
use crate::linalg::{CMatrix, LinalgError, Tensor4};
use crate::metric::JetMatrix;
use crate::Tolerances;

use super::derived::schur_jets;
use super::BundleError;

/// Curvature of a subbundle and its quotient, with the exact-identity
/// residuals that certify both computations against each other.
pub struct SubQuotient {
    /// Subbundle curvature in the gauged frame (bundle metric identity).
    pub sub: CurvaturePoint,
    /// Quotient curvature in the gauged complement frame.
    pub quot: CurvaturePoint,
    /// Ambient curvature restricted to the leading s frame indices.
    pub restricted_sub: Tensor4,
    /// Ambient curvature restricted to the complementary frame indices.
    pub restricted_quot: Tensor4,
    /// Defect of the second-fundamental-form identity, relative.
    pub sff_residual: f64,
    /// Defect of the mirror identity for the quotient, relative.
    pub quot_residual: f64,
    /// Upper-triangular frame change with frame^t H(p) conj(frame) = I.
    pub frame: CMatrix,
}

/// Splits the bundle described by `jets` along its first `s` frame vectors.
/// Requires 1 <= s < rank so that both sides are nonempty.
pub fn sub_quotient_curvature(
    jets: &JetMatrix,
    s: usize,
    z: &[Complex64],
    tol: &Tolerances,
) -> Result<SubQuotient, BundleError> {
    let r = jets.rows();
    let n = jets.vars();
    if s == 0 || s >= r {
        return Err(BundleError::BadIndexSet {
            detail: format!("subbundle rank {s} does not split a bundle of rank {r}"),
        });
    }

    let l = jets.value().cholesky_lower(tol.frame_pivot).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { pivot, .. } => BundleError::FrameDegenerate { pivot },
        other => other.into(),
    })?;
    let linv = l.lower_triangular_inverse(tol.frame_pivot)?;
    let c0 = linv.transpose();

    // H' = C0^t H conj(C0) has value exactly I up to roundoff, and C0 is
    // upper triangular, so span(e_1..e_s) is untouched.
    let gauged = JetMatrix::constant(&linv, n)
        .matmul(jets)
        .matmul(&JetMatrix::constant(&c0.conj(), n));

    let ambient = curvature_of_jets(&gauged, tol.singular_pivot)?;

    let sub_idx: Vec<usize> = (0..s).collect();
    let sub_jets = gauged.submatrix(&sub_idx, &sub_idx);
    let sub_tensor = curvature_of_jets(&sub_jets, tol.singular_pivot)?;

    let quot_jets = schur_jets(&gauged, &sub_idx, tol)?;
    let quot_tensor = curvature_of_jets(&quot_jets, tol.singular_pivot)?;

    let restricted_sub = Tensor4::from_fn(n, s, |i, j, a, b| ambient.get(i, j, a, b));
    let restricted_quot =
        Tensor4::from_fn(n, r - s, |i, j, a, b| ambient.get(i, j, s + a, s + b));

    let d: Vec<CMatrix> = (0..n).map(|i| gauged.d(i)).collect();
    let dbar: Vec<CMatrix> = (0..n).map(|j| gauged.dbar(j)).collect();
    let scale = ambient.max_abs().max(1.0);

    let mut sff_residual = 0.0f64;
    let mut quot_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for a in 0..s {
                for b in 0..s {
                    let mut gram = Complex64::new(0.0, 0.0);
                    for c in s..r {
                        gram += d[i][(a, c)] * dbar[j][(c, b)];
                    }
                    let diff = restricted_sub.get(i, j, a, b) - sub_tensor.get(i, j, a, b) - gram;
                    sff_residual = sff_residual.max(diff.norm());
                }
            }
            for a in 0..r - s {
                for b in 0..r - s {
                    let mut gram = Complex64::new(0.0, 0.0);
                    for c in 0..s {
                        gram += dbar[j][(s + a, c)] * d[i][(c, s + b)];
                    }
                    let diff =
                        quot_tensor.get(i, j, a, b) - restricted_quot.get(i, j, a, b) - gram;
                    quot_residual = quot_residual.max(diff.norm());
                }
            }
        }
    }

    Ok(SubQuotient {
        sub: CurvaturePoint {
            point: z.to_vec(),
            tensor: sub_tensor,
            base_metric: CMatrix::identity(n),
            bundle_metric: CMatrix::identity(s),
        },
        quot: CurvaturePoint {
            point: z.to_vec(),
            tensor: quot_tensor,
            base_metric: CMatrix::identity(n),
            bundle_metric: CMatrix::identity(r - s),
        },
        restricted_sub,
        restricted_quot,
        sff_residual: sff_residual / scale,
        quot_residual: quot_residual / scale,
        frame: c0,
    })
}
