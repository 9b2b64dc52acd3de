//! Numerical verification of curvature positivity for Hermitian metrics on
//! holomorphic vector bundles.
//!
//! The crate evaluates bundle metrics given in closed form (a small
//! expression language or the built-in catalog), differentiates them exactly
//! with forward-mode jets in the coordinates and their conjugates, assembles
//! the Chern curvature tensor, builds induced bundles (duals, tensor and
//! exterior powers, sub/quotient bundles, the hyperplane line bundle on the
//! projectivized dual), and certifies or refutes pointwise positivity
//! notions with explicit witnesses.

pub mod bundle;
pub mod certify;
pub mod curvature;
pub mod linalg;
pub mod metric;
pub mod par;
pub mod report;
pub mod suite;
pub mod tol;

pub use tol::Tolerances;
