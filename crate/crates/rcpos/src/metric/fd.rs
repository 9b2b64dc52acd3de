//! Finite-difference probe for the forward-mode jets.
//!
//! Everything here goes through plain expression evaluation
//! ([`ExprNode::eval_value`]); none of the jet propagation code is touched,
//! so agreement between the two is a genuine cross-check and not a tautology.

use num_complex::Complex64;

use super::expr::ExprNode;
use super::field::MetricField;
use super::jet::WirtingerJet;
use super::MetricError;
use crate::linalg::CMatrix;
use crate::Tolerances;

/// Worst relative disagreement between jets and finite differences,
/// split by derivative order.
#[derive(Clone, Copy, Debug, Default)]
pub struct FdReport {
    pub value: f64,
    pub first: f64,
    pub mixed: f64,
}

impl FdReport {
    pub fn max(&self) -> f64 {
        self.value.max(self.first).max(self.mixed)
    }
}

/// Evaluates with real-coordinate offsets: axis 2i is Re z_i, axis 2i+1 is
/// Im z_i.
fn eval_shift(
    expr: &ExprNode,
    z: &[Complex64],
    shifts: &[(usize, f64)],
    floor: f64,
) -> Result<Complex64, MetricError> {
    let mut w = z.to_vec();
    for &(axis, d) in shifts {
        let i = axis / 2;
        if axis % 2 == 0 {
            w[i].re += d;
        } else {
            w[i].im += d;
        }
    }
    Ok(expr.eval_value(&w, floor)?)
}

/// Central first difference along one real axis, Richardson extrapolated.
fn d1(
    expr: &ExprNode,
    z: &[Complex64],
    axis: usize,
    h: f64,
    floor: f64,
) -> Result<Complex64, MetricError> {
    let at = |d: f64| eval_shift(expr, z, &[(axis, d)], floor);
    let coarse = (at(h)? - at(-h)?) / (2.0 * h);
    let fine = (at(h / 2.0)? - at(-h / 2.0)?) / h;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Pure second difference along one real axis, Richardson extrapolated.
fn d2_same(
    expr: &ExprNode,
    z: &[Complex64],
    axis: usize,
    h: f64,
    floor: f64,
) -> Result<Complex64, MetricError> {
    let center = eval_shift(expr, z, &[], floor)?;
    let stencil = |s: f64| -> Result<Complex64, MetricError> {
        let plus = eval_shift(expr, z, &[(axis, s)], floor)?;
        let minus = eval_shift(expr, z, &[(axis, -s)], floor)?;
        Ok((plus - center * 2.0 + minus) / (s * s))
    };
    let coarse = stencil(h)?;
    let fine = stencil(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Mixed second difference across two distinct real axes, Richardson
/// extrapolated.
fn d2_cross(
    expr: &ExprNode,
    z: &[Complex64],
    axis_a: usize,
    axis_b: usize,
    h: f64,
    floor: f64,
) -> Result<Complex64, MetricError> {
    let stencil = |s: f64| -> Result<Complex64, MetricError> {
        let pp = eval_shift(expr, z, &[(axis_a, s), (axis_b, s)], floor)?;
        let pm = eval_shift(expr, z, &[(axis_a, s), (axis_b, -s)], floor)?;
        let mp = eval_shift(expr, z, &[(axis_a, -s), (axis_b, s)], floor)?;
        let mm = eval_shift(expr, z, &[(axis_a, -s), (axis_b, -s)], floor)?;
        Ok((pp - pm - mp + mm) / (4.0 * s * s))
    };
    let coarse = stencil(h)?;
    let fine = stencil(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Approximates the full Wirtinger jet of a scalar expression by central
/// differences in the underlying real coordinates:
///
/// d/dz    = (d/dx - i d/dy) / 2
/// d/dzbar = (d/dx + i d/dy) / 2
///
/// and for the mixed block with i = j the cross terms cancel, leaving a
/// quarter of the real Laplacian in the (x_i, y_i) plane.
pub fn wirtinger_fd(
    expr: &ExprNode,
    z: &[Complex64],
    h: f64,
    floor: f64,
) -> Result<WirtingerJet, MetricError> {
    let n = z.len();
    let i = Complex64::new(0.0, 1.0);
    let mut jet = WirtingerJet::constant(eval_shift(expr, z, &[], floor)?, n);

    let mut dx = Vec::with_capacity(n);
    let mut dy = Vec::with_capacity(n);
    for k in 0..n {
        dx.push(d1(expr, z, 2 * k, h, floor)?);
        dy.push(d1(expr, z, 2 * k + 1, h, floor)?);
    }
    for k in 0..n {
        jet.dz[k] = (dx[k] - i * dy[k]) * 0.5;
        jet.dzbar[k] = (dx[k] + i * dy[k]) * 0.5;
    }

    let mut mixed = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let m = if a == b {
                let xx = d2_same(expr, z, 2 * a, h, floor)?;
                let yy = d2_same(expr, z, 2 * a + 1, h, floor)?;
                (xx + yy) * 0.25
            } else {
                let xx = d2_cross(expr, z, 2 * a, 2 * b, h, floor)?;
                let xy = d2_cross(expr, z, 2 * a, 2 * b + 1, h, floor)?;
                let yx = d2_cross(expr, z, 2 * a + 1, 2 * b, h, floor)?;
                let yy = d2_cross(expr, z, 2 * a + 1, 2 * b + 1, h, floor)?;
                (xx + i * xy - i * yx + yy) * 0.25
            };
            mixed[(a, b)] = m;
        }
    }
    jet.dzdzbar = mixed;
    Ok(jet)
}

/// Compares all metric entry jets at a point against the finite-difference
/// probe. Residuals are relative to the larger of 1 and the jet magnitude,
/// so tiny entries do not inflate the report.
pub fn compare_field_jets(
    field: &MetricField,
    z: &[Complex64],
    tol: &Tolerances,
) -> Result<FdReport, MetricError> {
    let jets = field.eval_jets(z, tol)?;
    let h = tol.fd_step;
    let mut report = FdReport::default();
    for a in 0..field.rank {
        for b in a..field.rank {
            let jet = jets.entry(a, b);
            let fd = wirtinger_fd(field.entry(a, b), z, h, tol.singular_division)?;
            let scale = 1.0f64.max(jet.magnitude());
            report.value = report.value.max((jet.value - fd.value).norm() / scale);
            for k in 0..field.dim {
                report.first = report
                    .first
                    .max((jet.dz[k] - fd.dz[k]).norm() / scale)
                    .max((jet.dzbar[k] - fd.dzbar[k]).norm() / scale);
            }
            report.mixed = report
                .mixed
                .max(jet.dzdzbar.max_abs_diff(&fd.dzdzbar) / scale);
        }
    }
    Ok(report)
}
