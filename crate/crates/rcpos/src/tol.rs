//! Central tolerance configuration.
//!
//! Every threshold the engine compares against lives in one record so that a
//! sweep can be tightened or loosened coherently. Defaults reflect what exact
//! forward-mode jets achieve on well-conditioned charts: structural residuals
//! (Hermitian symmetry, reconstruction, frame gauges) sit near machine
//! precision, while anything routed through an iterative optimizer or a
//! finite-difference cross-check gets a wider band.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative residual allowed when asserting a matrix is Hermitian.
    pub hermitian: f64,
    /// Relative residual for the conjugate pair symmetry of curvature tensors.
    pub tensor_conj_symmetry: f64,
    /// Unit vectors must satisfy |<v,v> - 1| below this.
    pub unit_norm: f64,
    /// Eigensolver sweep termination: off-diagonal Frobenius norm relative to
    /// the input norm.
    pub eig_offdiag: f64,
    /// Cap on full Jacobi sweeps before declaring non-convergence.
    pub eig_max_sweeps: usize,
    /// Relative reconstruction residual ||V D V^* - M|| the eigensolver must meet.
    pub eig_residual: f64,
    /// Jet consistency: conj(dh_{ab}/dz^i) against dh_{ba}/dzbar^i, relative.
    pub jet_hermitian: f64,
    /// Relative disagreement allowed between exact jets and the
    /// finite-difference probe.
    pub fd_cross_check: f64,
    /// Step used by the central-difference probe.
    pub fd_step: f64,
    /// |denominator| below which expression evaluation reports a singularity.
    pub singular_division: f64,
    /// Pivot ratio below which a metric value matrix is treated as singular.
    pub singular_pivot: f64,
    /// Kahler symmetry residual (relative to local metric scale).
    pub kahler: f64,
    /// Scalar comparison band for s vs s-hat and trace identities.
    pub scalar_identity: f64,
    /// Frame covariance / congruence transport residual.
    pub congruence: f64,
    /// Second-fundamental-form residual for sub/quotient curvature.
    pub sff_residual: f64,
    /// Monotonicity slack: contracted curvature differences may dip this far
    /// below zero before counting as a violation.
    pub monotonicity_slack: f64,
    /// Cross-check residual between the direct and block-formula routes for
    /// the induced hyperplane line bundle.
    pub proj_cross_check: f64,
    /// First derivatives remaining after the normal-frame gauge must be below
    /// this (relative) or the gauge is rejected.
    pub gauge_first_deriv: f64,
    /// Cholesky/Gram-Schmidt pivot threshold for frame normalization.
    pub frame_pivot: f64,
    /// Margin band around zero (after normalizing the tensor sup norm to 1)
    /// inside which a positivity verdict is inconclusive.
    pub margin: f64,
    /// Band around zero for eigenvalue sign counting, relative to matrix norm.
    pub zero_band: f64,
    /// Residual bound for the minimizer variation relations, relative to the
    /// tensor sup norm.
    pub lemma_residual: f64,
    /// Allowed absolute gap between the optimizer and the dense grid oracle.
    pub grid_agreement: f64,
    /// Strictness required of a trace hypothesis before the implication sweep
    /// asserts its conclusion.
    pub trace_hypothesis: f64,
    /// Witness re-evaluation must reproduce the stored margin this closely.
    pub witness_replay: f64,
    /// Monte Carlo z-score accepted for the averaging identity.
    pub mc_z_score: f64,
    /// Hard cap on derived bundle ranks.
    pub rank_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-12,
            tensor_conj_symmetry: 1e-10,
            unit_norm: 1e-12,
            eig_offdiag: 1e-13,
            eig_max_sweeps: 100,
            eig_residual: 1e-10,
            jet_hermitian: 1e-10,
            fd_cross_check: 1e-6,
            fd_step: 1e-4,
            singular_division: 1e-14,
            singular_pivot: 1e-14,
            kahler: 1e-8,
            scalar_identity: 1e-8,
            congruence: 1e-9,
            sff_residual: 1e-6,
            monotonicity_slack: 1e-8,
            proj_cross_check: 1e-6,
            gauge_first_deriv: 1e-8,
            frame_pivot: 1e-10,
            margin: 1e-7,
            zero_band: 1e-9,
            lemma_residual: 1e-6,
            grid_agreement: 1e-4,
            trace_hypothesis: 1e-8,
            witness_replay: 1e-9,
            mc_z_score: 3.0,
            rank_cap: 256,
        }
    }
}
