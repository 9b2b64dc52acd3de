//! Trace positivity implication: if the base-trace of the curvature,
//! taken against the base metric, is positive definite at a point, then
//! the exterior and tensor powers of the bundle are RC-positive there.
//! This module runs that implication mechanically: hypothesis margin from
//! an exact eigensolve, conclusion from the RC certifier on each derived
//! bundle, and any point where the hypothesis holds but a conclusion
//! fails to certify is a hard failure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bundle::{derived_curvature, BundleExpr};
use crate::curvature::{chern_curvature, CurvaturePoint};
use crate::linalg::{hermitian_eig, CMatrix};
use crate::metric::MetricField;
use crate::tol::Tolerances;

use super::{framed_point, CertifyError, Verdict};

/// Normalized minimum eigenvalue of the curvature trace against the base
/// metric. Positive means the trace form is positive definite.
pub fn trace_form_margin(cp: &CurvaturePoint, tol: &Tolerances) -> Result<f64, CertifyError> {
    let fp = framed_point(cp, tol)?;
    let r = fp.tensor.rank();
    let n = fp.tensor.base_dim();
    let m = CMatrix::from_fn(r, r, |a, b| {
        (0..n).map(|i| fp.tensor.get(i, i, a, b)).sum::<Complex64>()
    });
    let eig = hermitian_eig(&m.hermitianize(), tol)?;
    if fp.scale == 0.0 {
        Ok(0.0)
    } else {
        Ok(eig.min() / fp.scale)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceImplicationRow {
    pub point: Vec<Complex64>,
    /// Canonical form of the derived-bundle expression checked.
    pub expr: String,
    pub hypothesis_met: bool,
    pub trace_margin: f64,
    /// RC-positivity verdict for the derived bundle; None when the
    /// hypothesis failed and the implication is vacuous.
    pub conclusion: Option<Verdict>,
    pub conclusion_margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceImplicationReport {
    pub rows: Vec<TraceImplicationRow>,
    pub points: usize,
    /// Points where the trace form was positive definite.
    pub hypothesis_points: usize,
    /// Rows with the hypothesis met whose conclusion failed to certify.
    pub failures: usize,
}

impl TraceImplicationReport {
    pub fn passes(&self) -> bool {
        self.failures == 0
    }
}

/// Run the implication at each point: hypothesis margin above
/// `tol.trace_hypothesis` obliges every listed derived bundle to earn an
/// RC-positive certificate there.
pub fn verify_trace_implication(
    field: &MetricField,
    exprs: &[BundleExpr],
    points: &[Vec<Complex64>],
    seed: u64,
    tol: &Tolerances,
) -> Result<TraceImplicationReport, CertifyError> {
    let mut rows = Vec::new();
    let mut hypothesis_points = 0usize;
    let mut failures = 0usize;
    for (pi, z) in points.iter().enumerate() {
        let cp = chern_curvature(field, z, tol)?;
        let trace_margin = trace_form_margin(&cp, tol)?;
        let hypothesis_met = trace_margin > tol.trace_hypothesis;
        if hypothesis_met {
            hypothesis_points += 1;
        }
        for (ei, expr) in exprs.iter().enumerate() {
            let mut row = TraceImplicationRow {
                point: z.clone(),
                expr: expr.to_string(),
                hypothesis_met,
                trace_margin,
                conclusion: None,
                conclusion_margin: None,
            };
            if hypothesis_met {
                let dcp = derived_curvature(expr, field, z, tol)?;
                let point_seed = seed
                    .wrapping_add((pi as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
                    .wrapping_add((ei as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9));
                let cert = super::certify_rc_positive(&dcp, point_seed, tol)?;
                if cert.verdict != Verdict::Certified {
                    failures += 1;
                }
                row.conclusion = Some(cert.verdict);
                row.conclusion_margin = Some(cert.margin);
            }
            rows.push(row);
        }
    }
    Ok(TraceImplicationReport { rows, points: points.len(), hypothesis_points, failures })
}
