//! Pointwise positivity certification.
//!
//! Every notion here reduces to an optimization over unit vectors of a
//! quartic form built from the curvature tensor at one point. The verdicts
//! are numerical, not symbolic: `Certified` and `Refuted` both mean "the
//! extremal value clears the margin band", and anything inside the band is
//! reported as `Inconclusive` rather than rounded to a side.
//!
//! All margins are normalized by the sup norm of the curvature tensor in
//! metric-orthonormal frames, so the verdict bands mean the same thing for
//! a metric and for any constant rescaling of it. The unnormalized value is
//! kept alongside for callers that want the raw extremum.

mod griffiths;
mod hsc;
mod opt;
mod rc;
mod trace;

pub use griffiths::{certify_griffiths, griffiths_grid_margin, griffiths_pair_value};
pub use hsc::{
    certify_hsc_positive, hsc_extremum, hsc_grid_min, verify_minimizer_relations, HscExtremum,
    MinimizerReport, RelationResidual,
};
pub use rc::{
    certify_rc_negative, certify_rc_positive, line_bundle_form, q_positivity_count, rc_grid_margin,
    rc_section_extremes,
};
pub use trace::{verify_trace_implication, TraceImplicationReport, TraceImplicationRow};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bundle::BundleError;
use crate::curvature::{CurvatureError, CurvaturePoint};
use crate::linalg::{metric_orthonormal_frame, CMatrix, LinalgError, Tensor4};
use crate::metric::MetricError;
use crate::tol::Tolerances;

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Outcome of a certification run. `Inconclusive` is a first-class verdict:
/// it covers extrema inside the margin band and identically flat curvature,
/// where no sign statement is numerically defensible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerStats {
    /// Restarts attempted (structured seeds plus random seeds).
    pub restarts: usize,
    /// Line-search iterations summed over all restarts.
    pub iterations: usize,
    /// Grid points evaluated, when a grid pass ran; zero otherwise.
    pub grid: usize,
}

/// Certificate for one positivity notion at one point.
///
/// `margin` is the extremal objective value divided by the frame-normalized
/// curvature sup norm `scale`; `raw_margin = margin * scale` is the extremum
/// in metric-orthonormal frames without that division. The sign convention
/// is "positive margin supports the notion", so a refutation shows up as a
/// negative margin together with witness vectors realizing it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub notion: String,
    pub verdict: Verdict,
    pub margin: f64,
    pub raw_margin: f64,
    /// Sup norm of the curvature tensor in metric-orthonormal frames.
    pub scale: f64,
    /// Extremal bundle section, in the original coordinates, metric-unit.
    pub witness_section: Vec<Complex64>,
    /// Extremal base direction, in the original coordinates, metric-unit.
    pub witness_direction: Vec<Complex64>,
    pub stats: OptimizerStats,
}

impl PositivityCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Curvature moved to metric-orthonormal frames in both slots.
///
/// The tensor keeps its physical magnitude; `scale` is its sup norm, used
/// to normalize margins. Frames are kept so extremizers can be mapped back
/// to the original coordinates.
pub(crate) struct FramedPoint {
    pub tensor: Tensor4,
    pub scale: f64,
    pub base_frame: CMatrix,
    pub bundle_frame: CMatrix,
}

pub(crate) fn framed_point(cp: &CurvaturePoint, tol: &Tolerances) -> Result<FramedPoint, CertifyError> {
    let base_frame = metric_orthonormal_frame(&cp.base_metric, tol)?;
    let bundle_frame = metric_orthonormal_frame(&cp.bundle_metric, tol)?;
    let tensor = cp.tensor.transform_base(&base_frame).transform_bundle(&bundle_frame);
    let scale = tensor.max_abs();
    Ok(FramedPoint { tensor, scale, base_frame, bundle_frame })
}

/// Margin band shared by every certificate: the raw extremum divided by
/// `scale`, with a flat tensor (scale 0) always inconclusive.
pub(crate) fn banded_verdict(scale: f64, raw_value: f64, tol: &Tolerances) -> (f64, Verdict) {
    if scale == 0.0 {
        // Identically flat at this point: nothing to certify or refute.
        return (0.0, Verdict::Inconclusive);
    }
    let margin = raw_value / scale;
    let v = if margin > tol.margin {
        Verdict::Certified
    } else if margin < -tol.margin {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    };
    (margin, v)
}

impl FramedPoint {
    /// Margin band: values are compared after dividing by the tensor scale,
    /// so the band width is relative to the curvature's own magnitude.
    pub fn verdict(&self, raw_value: f64, tol: &Tolerances) -> (f64, Verdict) {
        banded_verdict(self.scale, raw_value, tol)
    }

    /// Map a frame-coordinate unit vector back to the original coordinates.
    /// The result is metric-unit by the congruence defining the frame.
    pub fn raw_direction(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.base_frame.mul_vec(u)
    }

    pub fn raw_section(&self, a: &[Complex64]) -> Vec<Complex64> {
        self.bundle_frame.mul_vec(a)
    }
}
