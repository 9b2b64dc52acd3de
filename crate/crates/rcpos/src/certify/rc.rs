//! RC-positivity: for every nonzero section a there must exist a base
//! direction v with R(v, v̄, a, ā) > 0. Equivalently the minimum over
//! metric-unit a of the top generalized eigenvalue of the section block
//! H_a = R(·, ·, a, ā) is positive, which is what gets optimized here.

use num_complex::Complex64;

use crate::curvature::CurvaturePoint;
use crate::linalg::{
    generalized_sign_counts, hermitian_eig, vec_norm, CMatrix, LinalgError, SignCounts, Tensor4,
};
use crate::tol::Tolerances;

use super::opt::{minimize_on_sphere, seed_bank};
use super::{framed_point, CertifyError, FramedPoint, OptimizerStats, PositivityCertificate};

/// Certify `min_a λ_max(H_a) > 0` over metric-unit sections a, with the
/// eigenvalue taken against the base metric. The inner maximization is an
/// exact Hermitian eigensolve; the outer minimization is multi-start
/// projected gradient, using the envelope gradient `H_a`-top-eigenvector
/// direction block applied to a.
pub fn certify_rc_positive(
    cp: &CurvaturePoint,
    seed: u64,
    tol: &Tolerances,
) -> Result<PositivityCertificate, CertifyError> {
    let fp = framed_point(cp, tol)?;
    rc_certificate(&fp, fp.tensor.clone(), "rc-positive", seed, tol)
}

/// RC-negativity of the tensor is RC-positivity of its negation, exactly:
/// λ_min(H_a) = -λ_max(-H_a), and both quantifiers flip together.
pub fn certify_rc_negative(
    cp: &CurvaturePoint,
    seed: u64,
    tol: &Tolerances,
) -> Result<PositivityCertificate, CertifyError> {
    let fp = framed_point(cp, tol)?;
    let negated = fp.tensor.scaled(-1.0);
    rc_certificate(&fp, negated, "rc-negative", seed, tol)
}

fn rc_certificate(
    fp: &FramedPoint,
    tensor: Tensor4,
    notion: &str,
    seed: u64,
    tol: &Tolerances,
) -> Result<PositivityCertificate, CertifyError> {
    let n = tensor.base_dim();
    let r = tensor.rank();
    let seeds = seed_bank(r, 2 * r * r, seed);
    let run = minimize_on_sphere(&seeds, |a| {
        let eig = hermitian_eig(&tensor.section_block(a).hermitianize(), tol)?;
        let top = eig.eigenvector(n - 1);
        // Envelope gradient: at the top eigenvector v the objective is the
        // smooth function a ↦ a* D(v) a, whose Wirtinger gradient is D(v)a.
        let grad = tensor.direction_block(&top).mul_vec(a);
        Ok((eig.max(), grad))
    })?;

    // Re-evaluate the extremum from scratch at emission; the certificate
    // must not depend on optimizer-internal state.
    let a_best = run.argmin;
    let eig = hermitian_eig(&tensor.section_block(&a_best).hermitianize(), tol)?;
    let value = eig.max();
    let v_top = eig.eigenvector(n - 1);
    let (margin, verdict) = fp.verdict(value, tol);
    Ok(PositivityCertificate {
        notion: notion.to_string(),
        verdict,
        margin,
        raw_margin: value,
        scale: fp.scale,
        witness_section: fp.raw_section(&a_best),
        witness_direction: fp.raw_direction(&v_top),
        stats: OptimizerStats { restarts: run.restarts, iterations: run.iterations, grid: 0 },
    })
}

/// Replay helper: normalized extreme eigenvalues (min, max) of the section
/// block at a given section in original coordinates. Used to re-check
/// emitted witnesses without trusting anything from the optimizer run.
pub fn rc_section_extremes(
    cp: &CurvaturePoint,
    section: &[Complex64],
    tol: &Tolerances,
) -> Result<(f64, f64), CertifyError> {
    let fp = framed_point(cp, tol)?;
    if section.len() != fp.tensor.rank() {
        return Err(CertifyError::DimensionMismatch {
            detail: format!(
                "section has {} components, bundle rank is {}",
                section.len(),
                fp.tensor.rank()
            ),
        });
    }
    let a = fp.bundle_frame.inverse(tol.singular_pivot)?.mul_vec(section);
    let norm = vec_norm(&a);
    if norm == 0.0 {
        return Err(CertifyError::Linalg(LinalgError::ZeroVector { norm }));
    }
    let a: Vec<Complex64> = a.iter().map(|z| z / norm).collect();
    let eig = hermitian_eig(&fp.tensor.section_block(&a).hermitianize(), tol)?;
    if fp.scale == 0.0 {
        Ok((0.0, 0.0))
    } else {
        Ok((eig.min() / fp.scale, eig.max() / fp.scale))
    }
}

/// Exhaustive oracle for rank ≤ 2: metric-unit sections modulo phase are
/// `(cos β, sin β e^{iψ})`, so a dense grid plus the exact inner eigensolve
/// brackets the true min-max margin. Returns the normalized margin.
pub fn rc_grid_margin(
    cp: &CurvaturePoint,
    resolution: usize,
    tol: &Tolerances,
) -> Result<f64, CertifyError> {
    let fp = framed_point(cp, tol)?;
    grid_margin(&fp, resolution, tol, |eig| eig.max())
}

pub(crate) fn grid_margin(
    fp: &FramedPoint,
    resolution: usize,
    tol: &Tolerances,
    pick: impl Fn(&crate::linalg::HermitianEigen) -> f64,
) -> Result<f64, CertifyError> {
    let r = fp.tensor.rank();
    let eval = |a: &[Complex64]| -> Result<f64, CertifyError> {
        let eig = hermitian_eig(&fp.tensor.section_block(a).hermitianize(), tol)?;
        Ok(pick(&eig))
    };
    let best = match r {
        1 => eval(&[Complex64::new(1.0, 0.0)])?,
        2 => {
            super::opt::polar_grid_min(resolution, |beta, psi| {
                eval(&[Complex64::new(beta.cos(), 0.0), Complex64::from_polar(beta.sin(), psi)])
            })?
            .0
        }
        _ => {
            return Err(CertifyError::DimensionMismatch {
                detail: format!("grid oracle covers rank ≤ 2, got rank {r}"),
            })
        }
    };
    if fp.scale == 0.0 {
        Ok(0.0)
    } else {
        Ok(best / fp.scale)
    }
}

/// Signed eigenvalue counts of a Hermitian form against a metric, with the
/// zero band taken relative to the form's own magnitude. This is the
/// q-positivity test: the form is q-positive when at least dim − q
/// eigenvalues are positive.
pub fn q_positivity_count(
    form: &CMatrix,
    g: &CMatrix,
    tol: &Tolerances,
) -> Result<(SignCounts, Vec<f64>), CertifyError> {
    Ok(generalized_sign_counts(form, g, tol)?)
}

/// The curvature form of a line bundle (rank 1) as a base-indexed Hermitian
/// matrix, in the original coordinates. Pair it with the base metric in
/// `q_positivity_count`.
pub fn line_bundle_form(cp: &CurvaturePoint) -> Result<CMatrix, CertifyError> {
    if cp.tensor.rank() != 1 {
        return Err(CertifyError::DimensionMismatch {
            detail: format!("curvature form needs rank 1, got rank {}", cp.tensor.rank()),
        });
    }
    let n = cp.tensor.base_dim();
    Ok(CMatrix::from_fn(n, n, |i, j| cp.tensor.get(i, j, 0, 0)))
}
