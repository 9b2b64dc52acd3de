//! Chern curvature of a metric on a holomorphic bundle, and the scalar
//! quantities derived from it on the tangent bundle.
//!
//! With H the metric value matrix and dH its jet slots at a point, the
//! curvature block for the base pair (i, j) is
//!
//!   R_(i jbar) = -d_i dbar_j H + (d_i H) H^{-1} (dbar_j H)
//!
//! stored as `tensor[i, j, a, b]` over bundle indices (a, b). All entries
//! come from exact jets, so the only floating-point error is plain matrix
//! arithmetic at the point.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{hermitian_eig, metric_orthonormal_frame, CMatrix, LinalgError, Tensor4};
use crate::metric::{JetMatrix, MetricError, MetricField};
use crate::Tolerances;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("metric value is numerically singular (pivot {pivot:.3e})")]
    SingularMetric { pivot: f64 },
    #[error("operation needs the tangent bundle: base dim {dim} != rank {rank}")]
    RankMismatch { dim: usize, rank: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn singular(e: LinalgError) -> CurvatureError {
    match e {
        LinalgError::Singular { pivot } => CurvatureError::SingularMetric { pivot },
        other => CurvatureError::Linalg(other),
    }
}

/// Curvature data at one chart point.
#[derive(Clone, Debug)]
pub struct CurvaturePoint {
    pub point: Vec<Complex64>,
    /// R[i, j, a, b] with (i, j) base and (a, b) bundle indices.
    pub tensor: Tensor4,
    /// Metric on base directions. Coincides with `bundle_metric` when the
    /// field is square (tangent-bundle reading); identity otherwise, so
    /// directions are measured in the chart coordinates.
    pub base_metric: CMatrix,
    /// Bundle metric value h at the point.
    pub bundle_metric: CMatrix,
}

/// Curvature from an already evaluated metric jet. This is the single
/// formula everything else reduces to; induced-bundle constructions call it
/// on transformed jets.
pub fn curvature_of_jets(jets: &JetMatrix, pivot_tol: f64) -> Result<Tensor4, CurvatureError> {
    let r = jets.rows();
    let n = jets.vars();
    let hinv = jets.value().inverse(pivot_tol).map_err(singular)?;
    let mut tensor = Tensor4::zeros(n, r);
    for i in 0..n {
        let di = jets.d(i);
        let left = di.matmul(&hinv);
        for j in 0..n {
            let block = left.matmul(&jets.dbar(j)).sub(&jets.ddbar(i, j));
            for a in 0..r {
                for b in 0..r {
                    tensor.set(i, j, a, b, block[(a, b)]);
                }
            }
        }
    }
    Ok(tensor)
}

/// Chern curvature of a metric field at a point.
pub fn chern_curvature(
    m: &MetricField,
    z: &[Complex64],
    tol: &Tolerances,
) -> Result<CurvaturePoint, CurvatureError> {
    let jets = m.eval_jets(z, tol)?;
    let tensor = curvature_of_jets(&jets, tol.singular_pivot)?;
    let h = jets.value();
    let base = if m.rank == m.dim { h.clone() } else { CMatrix::identity(m.dim) };
    Ok(CurvaturePoint { point: z.to_vec(), tensor, base_metric: base, bundle_metric: h })
}

/// Scalar curvature panel on the tangent bundle.
#[derive(Clone, Debug)]
pub struct ScalarPanel {
    /// Chern scalar curvature s = g^{ij} R_ij.
    pub s: f64,
    /// Double-trace scalar s_hat = g^{il} g^{kj} R_{ijkl}.
    pub s_hat: f64,
    /// First Ricci contraction over the bundle pair: R_ij = g^{kl} R_{ijkl}.
    pub ricci1: CMatrix,
    /// Second Ricci contraction over the base pair: R2_kl = g^{ij} R_{ijkl}.
    pub ricci2: CMatrix,
}

/// Contractions of the curvature with the inverse base metric. The raised
/// index convention is g^{ab} = (G^{-1})_{ba} for G the value matrix, so all
/// sums below are plain matrix-entry products.
pub fn scalar_panel(c: &CurvaturePoint, tol: &Tolerances) -> Result<ScalarPanel, CurvatureError> {
    let n = c.tensor.base_dim();
    let r = c.tensor.rank();
    if n != r {
        return Err(CurvatureError::RankMismatch { dim: n, rank: r });
    }
    let ginv = c.base_metric.inverse(tol.singular_pivot).map_err(singular)?;

    let mut ricci1 = CMatrix::zeros(n, n);
    let mut ricci2 = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc1 = Complex64::new(0.0, 0.0);
            let mut acc2 = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    acc1 += ginv[(l, k)] * c.tensor.get(i, j, k, l);
                    acc2 += ginv[(l, k)] * c.tensor.get(k, l, i, j);
                }
            }
            ricci1[(i, j)] = acc1;
            ricci2[(i, j)] = acc2;
        }
    }

    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += ginv[(j, i)] * ricci1[(i, j)];
        }
    }
    let mut s_hat = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s_hat += ginv[(l, i)] * ginv[(j, k)] * c.tensor.get(i, j, k, l);
                }
            }
        }
    }

    Ok(ScalarPanel { s: s.re, s_hat: s_hat.re, ricci1, ricci2 })
}

/// Pointwise symmetry defect of the Kahler condition d_i g_kl = d_k g_il,
/// relative to the overall jet magnitude at the point.
pub fn kahler_point_residual(jets: &JetMatrix) -> f64 {
    let n = jets.vars();
    debug_assert_eq!(jets.rows(), n);
    let mut scale = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            scale = scale.max(jets.entry(a, b).magnitude());
        }
    }
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        let di = jets.d(i);
        for k in 0..n {
            let dk = jets.d(k);
            for l in 0..n {
                worst = worst.max((di[(k, l)] - dk[(i, l)]).norm());
            }
        }
    }
    worst / scale
}

#[derive(Clone, Debug)]
pub struct KahlerVerdict {
    pub is_kahler: bool,
    pub worst_residual: f64,
    pub worst_point: Option<Vec<Complex64>>,
}

/// Numerical Kahler test for a square metric field over sample points.
/// A metric is declared Kahler only if every sampled point passes; the
/// verdict always reports the worst offender.
pub fn kahler_check(
    m: &MetricField,
    points: &[Vec<Complex64>],
    tol: &Tolerances,
) -> Result<KahlerVerdict, CurvatureError> {
    if m.rank != m.dim {
        return Err(CurvatureError::RankMismatch { dim: m.dim, rank: m.rank });
    }
    let mut worst = 0.0f64;
    let mut worst_point = None;
    for z in points {
        let jets = m.eval_jets(z, tol)?;
        let res = kahler_point_residual(&jets);
        if res >= worst {
            worst = res;
            worst_point = Some(z.clone());
        }
    }
    Ok(KahlerVerdict { is_kahler: worst <= tol.kahler, worst_residual: worst, worst_point })
}

#[derive(Clone, Debug)]
pub struct SphereAverage {
    pub mean: f64,
    pub prediction: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub samples: usize,
}

/// Monte-Carlo check of the unit-sphere average of holomorphic sectional
/// curvature against (s + s_hat) / (n (n + 1)).
///
/// The tensor is first moved to a frame where g is the identity at the
/// point, because the closed form is stated there; directions are then
/// uniform on the Euclidean unit sphere.
pub fn sphere_average_hsc(
    m: &MetricField,
    z: &[Complex64],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SphereAverage, CurvatureError> {
    let c = chern_curvature(m, z, tol)?;
    let panel = scalar_panel(&c, tol)?;
    let n = c.tensor.base_dim();

    let frame = metric_orthonormal_frame(&c.base_metric, tol)?;
    let normalized = c.tensor.transform_base(&frame).transform_bundle(&frame);

    let dirs = crate::linalg::sample_unit_sphere(n, samples, seed);
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for (k, xi) in dirs.iter().enumerate() {
        let h = normalized.quartic(xi, xi, xi, xi).re;
        let delta = h - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (h - mean);
    }
    let variance = if samples > 1 { m2 / (samples - 1) as f64 } else { 0.0 };
    let std_error = (variance / samples.max(1) as f64).sqrt();

    let prediction = (panel.s + panel.s_hat) / (n as f64 * (n as f64 + 1.0));
    let diff = (mean - prediction).abs();
    let z_score = if std_error < 1e-13 * (1.0 + mean.abs()) {
        if diff < 1e-10 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / std_error
    };

    Ok(SphereAverage { mean, prediction, std_error, z_score, samples })
}

/// Eigenvalue sign counts of both Ricci contractions in the base metric;
/// used by reports and invariance tests.
pub fn ricci_signs(
    c: &CurvaturePoint,
    tol: &Tolerances,
) -> Result<(crate::linalg::SignCounts, crate::linalg::SignCounts), CurvatureError> {
    let panel = scalar_panel(c, tol)?;
    let (s1, _) = crate::linalg::generalized_sign_counts(&panel.ricci1, &c.base_metric, tol)?;
    let (s2, _) = crate::linalg::generalized_sign_counts(&panel.ricci2, &c.base_metric, tol)?;
    Ok((s1, s2))
}

/// Largest conjugate-symmetry defect allowed before a curvature tensor is
/// considered corrupted; exposed for tests and the verification suite.
pub fn conj_symmetry_ok(t: &Tensor4, tol: &Tolerances) -> bool {
    t.conj_symmetry_residual() <= tol.tensor_conj_symmetry * t.max_abs().max(1e-300)
}

/// Frame used by the averaging identity and the certifier: T^t g conj(T) = I,
/// so `u -> T u` sends Euclidean unit vectors to g-unit vectors and passing T
/// to the tensor transforms rewrites the curvature in a g-orthonormal frame.
pub fn orthonormal_base_frame(
    c: &CurvaturePoint,
    tol: &Tolerances,
) -> Result<CMatrix, CurvatureError> {
    Ok(metric_orthonormal_frame(&c.base_metric, tol)?)
}

/// Smallest eigenvalue of h at the point, for diagnostics.
pub fn min_metric_eigenvalue(c: &CurvaturePoint, tol: &Tolerances) -> Result<f64, CurvatureError> {
    Ok(hermitian_eig(&c.bundle_metric, tol)?.min())
}
