//! Small dense complex linear algebra.
//!
//! Everything here operates on matrices of dimension at most a few hundred
//! (derived bundle ranks) and usually below ten, so the implementations favor
//! robustness and checkability over asymptotics.

mod cmatrix;
mod eig;
mod sphere;
mod tensor;

pub use cmatrix::CMatrix;
pub use eig::{generalized_sign_counts, hermitian_eig, metric_orthonormal_frame, HermitianEigen, SignCounts};
pub use sphere::{inner, sample_unit_sphere, vec_norm, UnitVector};
pub use tensor::Tensor4;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {offdiag:.3e})")]
    NoConvergence { sweeps: usize, offdiag: f64 },
    #[error("matrix is numerically singular (pivot {pivot:.3e})")]
    Singular { pivot: f64 },
    #[error("matrix is not positive definite (pivot {pivot:.3e} at step {step})")]
    NotPositiveDefinite { pivot: f64, step: usize },
    #[error("dimension mismatch: {context}")]
    Dimension { context: String },
    #[error("cannot normalize a vector of norm {norm:.3e}")]
    ZeroVector { norm: f64 },
}
