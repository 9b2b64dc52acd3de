//! Metric fields: closed-form Hermitian metrics with exact Wirtinger jets.
//!
//! A metric is a matrix of expressions in z1..zn and their conjugates.
//! Evaluation produces, per entry, the value together with all first
//! derivatives and the full mixed second-derivative block, propagated
//! exactly through the expression tree. Finite differences live in [`fd`]
//! purely as an independent probe.

pub mod catalog;
pub mod expr;
pub mod fd;
mod field;
mod jet;
mod parse;

pub use expr::ExprNode;
pub use fd::{compare_field_jets, wirtinger_fd, FdReport};
pub use field::{Domain, MetricField};
pub use jet::{JetMatrix, Singularity, WirtingerJet};

use crate::linalg::LinalgError;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("entries h[{row}][{col}] and its mirror disagree as conjugates (residual {residual:.3e})")]
    NonHermitianSpec { row: usize, col: usize, residual: f64 },
    #[error("diagonal entry h[{index}][{index}] missing and not recoverable by symmetry")]
    MissingDiagonal { index: usize },
    #[error("no catalog metric named '{name}'")]
    UnknownCatalogEntry { name: String },
    #[error("{message}")]
    BadParameter { message: String },
    #[error("{detail}")]
    OutOfDomain { detail: String },
    #[error("expression divides by a value of magnitude {magnitude:.3e}")]
    SingularExpression { magnitude: f64 },
    #[error("metric loses positivity at {point:?}: eigenvalue {eigenvalue:.3e}")]
    NotPositive { point: Vec<Complex64>, eigenvalue: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<Singularity> for MetricError {
    fn from(s: Singularity) -> Self {
        MetricError::SingularExpression { magnitude: s.magnitude }
    }
}

/// Parses a standalone expression in z1..z<dim>.
pub fn parse_expression(src: &str, dim: usize) -> Result<ExprNode, MetricError> {
    parse::parse_expression_raw(src, dim)
}
