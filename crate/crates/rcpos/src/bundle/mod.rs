//! Curvature of bundles built from a metric: duals, tensor / exterior /
//! symmetric powers, determinant lines, sub- and quotient bundles, and the
//! hyperplane line bundle over the projectivized dual.
//!
//! Algebraic constructions act blockwise on the curvature viewed as an
//! endomorphism per base-direction pair, after the frame is normalized so the
//! bundle metric at the point is the identity. Sub/quotient bundles and the
//! projectivization genuinely need metric jets and are computed from them,
//! with the blockwise formulas kept as independent cross-checks.

use thiserror::Error;

use crate::curvature::CurvatureError;
use crate::linalg::LinalgError;
use crate::metric::MetricError;

mod derived;
mod expr;
mod indices;
mod proj;
mod subquot;

pub use derived::{
    compound_matrix, derived_curvature, derived_metric_jets, normalized_bundle,
    sym_power_matrix, tensor_power_matrix,
};
pub use expr::BundleExpr;
pub use indices::{binomial, lex_subsets, multiset_arrangements, sorted_multisets, tuples};
pub use proj::{projectivization_curvature, ProjectivizationPoint};
pub use subquot::{sub_quotient_curvature, SubQuotient};

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("derived rank {rank} exceeds the cap of {cap}")]
    RankOverflow { rank: usize, cap: usize },
    #[error("bad frame index set: {detail}")]
    BadIndexSet { detail: String },
    #[error("frame normalization hit a degenerate pivot ({pivot:.3e})")]
    FrameDegenerate { pivot: f64 },
    #[error("normal-frame gauge left first derivatives at relative size {residual:.3e}")]
    GaugeFailure { residual: f64 },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("bundle expression error: {message}")]
    Parse { message: String },
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
