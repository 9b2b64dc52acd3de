//! Curvature of the tautological-dual line over the projectivized bundle.
//!
//! Input: metric jets at a base point and a fiber direction a. Output: the
//! full mixed second-derivative matrix of log |W|^2 in the dual metric, in
//! joint coordinates (base, affine chart on the fiber), two ways.
//!
//! Route A differentiates directly: extend the inverse-metric jets to the
//! joint variable set, form the squared dual norm of the moving covector W,
//! take log, and read off the mixed Hessian. Route B never touches the joint
//! variables: after a normal-frame gauge (metric value I, first derivatives
//! zero at the point) the base block is a curvature average over the
//! direction, the fiber block is the standard chart Hessian, and the cross
//! blocks vanish identically. Agreement of the two routes is the test that
//! gauge, inverse, and curvature all fit together; the matrix handed to
//! callers is route A's.

use num_complex::Complex64;

use crate::curvature::curvature_of_jets;
use crate::linalg::{metric_orthonormal_frame, CMatrix, LinalgError, Tensor4};
use crate::metric::{JetMatrix, WirtingerJet};
use crate::Tolerances;

use super::BundleError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Curvature data of the projectivization at one (point, direction) pair.
pub struct ProjectivizationPoint {
    /// Base point the jets were evaluated at.
    pub point: Vec<Complex64>,
    /// Direction rewritten in the gauged frame and affine chart; the last
    /// coordinate is exactly 1 and no coordinate exceeds 1 in modulus.
    pub chart_direction: Vec<Complex64>,
    /// Mixed Hessian of log of the squared dual norm, joint coordinates,
    /// (dim + rank - 1) square, Hermitian.
    pub curvature: CMatrix,
    /// Relative disagreement between the direct and the gauged route.
    pub cross_residual: f64,
    /// Largest first-derivative entry surviving the gauge, relative.
    pub gauge_residual: f64,
}

/// Evaluates both routes at base point `z` and fiber direction `a`.
pub fn projectivization_curvature(
    jets: &JetMatrix,
    z: &[Complex64],
    a: &[Complex64],
    tol: &Tolerances,
) -> Result<ProjectivizationPoint, BundleError> {
    let r = jets.rows();
    let n = jets.vars();
    if a.len() != r {
        return Err(BundleError::DimensionMismatch {
            detail: format!("direction has {} entries, bundle rank is {r}", a.len()),
        });
    }

    let h0 = jets.value();
    let c0 = metric_orthonormal_frame(&h0, tol).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { pivot, .. } => BundleError::FrameDegenerate { pivot },
        other => other.into(),
    })?;

    // Normal-frame gauge: C(zeta) = C0 (I - sum_i G_i^t zeta_i) with
    // G_i = C0^t (d_i H) conj(C0) kills the first derivatives of
    // H' = C^t H conj(C) at the point. Built as honest jets so the second
    // derivatives come out of the same arithmetic as everything else.
    let g: Vec<CMatrix> = (0..n)
        .map(|i| c0.transpose().matmul(&jets.d(i)).matmul(&c0.conj()))
        .collect();
    let corr: Vec<CMatrix> = g.iter().map(|gi| c0.matmul(&gi.transpose())).collect();
    let c_jet = JetMatrix::from_fn(r, r, n, |al, be| {
        let mut jet = WirtingerJet::constant(c0[(al, be)], n);
        for i in 0..n {
            jet = &jet + &WirtingerJet::coordinate(i, ZERO, n).scale(-corr[i][(al, be)]);
        }
        jet
    });
    let gauged = c_jet.transpose().matmul(jets).matmul(&c_jet.conj());

    let scale = h0.max_abs().max(1.0);
    let mut gauge_residual = 0.0f64;
    for i in 0..n {
        gauge_residual = gauge_residual.max(gauged.d(i).max_abs());
    }
    gauge_residual /= scale;
    if gauge_residual > tol.gauge_first_deriv {
        return Err(BundleError::GaugeFailure {
            residual: gauge_residual,
        });
    }

    // Direction in the gauged frame: sections transform by s = C u, dual
    // coefficients by a' = C0^t a at the point.
    let a_gauged = c0.transpose().mul_vec(a);
    let (pivot, pivot_abs) = a_gauged
        .iter()
        .enumerate()
        .map(|(k, v)| (k, v.norm()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("rank is positive");
    if pivot_abs == 0.0 {
        return Err(BundleError::Linalg(LinalgError::ZeroVector { norm: 0.0 }));
    }

    // Rotate the pivot to the last slot so the affine chart divides by the
    // largest coordinate; every chart coordinate then has modulus <= 1.
    let mut perm: Vec<usize> = (0..r).filter(|&k| k != pivot).collect();
    perm.push(pivot);
    let rotated = gauged.submatrix(&perm, &perm);
    let w: Vec<Complex64> = perm
        .iter()
        .map(|&k| a_gauged[k] / a_gauged[pivot])
        .collect();

    // Route A: joint variables (zeta_1..zeta_n, w_1..w_{r-1}), squared dual
    // norm phi = sum over alpha, beta of hinv[beta][alpha] w_alpha
    // conj(w_beta), curvature = mixed Hessian of log phi. The last chart
    // coordinate stays pinned at 1.
    let m = n + r - 1;
    let hinv = rotated.inverse(tol.singular_pivot)?;
    let hinv_ext = hinv.extend_vars(m);
    let w_jets: Vec<WirtingerJet> = (0..r)
        .map(|al| {
            if al + 1 == r {
                WirtingerJet::constant(ONE, m)
            } else {
                WirtingerJet::coordinate(n + al, w[al], m)
            }
        })
        .collect();
    let mut phi = WirtingerJet::constant(ZERO, m);
    for al in 0..r {
        for be in 0..r {
            let term = &(hinv_ext.entry(be, al) * &w_jets[al]) * &w_jets[be].conj();
            phi = &phi + &term;
        }
    }
    let log_phi = phi
        .ln(tol.singular_division)
        .map_err(|s| BundleError::Metric(s.into()))?;
    let route_a = log_phi.dzdzbar.hermitianize();

    // Route B: base block averages the gauged curvature against the
    // direction, fiber block is the chart Hessian of log |w|^2, cross blocks
    // vanish in the gauge.
    let tensor: Tensor4 = curvature_of_jets(&rotated, tol.singular_pivot)?;
    let q: f64 = w.iter().map(|v| v.norm_sqr()).sum();
    let mut route_b = CMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for al in 0..r {
                for be in 0..r {
                    acc += tensor.get(i, j, al, be) * w[be] * w[al].conj();
                }
            }
            route_b[(i, j)] = acc / q;
        }
    }
    for aa in 0..r - 1 {
        for bb in 0..r - 1 {
            let kron = if aa == bb { ONE } else { ZERO };
            route_b[(n + aa, n + bb)] = (kron - w[bb] * w[aa].conj() / q) / q;
        }
    }

    let cross_residual = route_a.max_abs_diff(&route_b) / route_a.max_abs().max(1.0);

    Ok(ProjectivizationPoint {
        point: z.to_vec(),
        chart_direction: w,
        curvature: route_a,
        cross_residual,
        gauge_residual,
    })
}
