//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not hermitian within tolerance (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is singular (|det| = {det_abs:.3e})")]
    Singular { det_abs: f64 },

    #[error("transformation is not unimodular (|det - 1| = {residual:.3e})")]
    NotUnimodular { residual: f64 },

    #[error("matrix does not satisfy the quaternion condition (residual {residual:.3e})")]
    NotQuaternion { residual: f64 },

    #[error("quaternion generator is not pure-vectorial unit (residual {residual:.3e})")]
    NotPureUnit { residual: f64 },

    #[error("newton iteration did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("no bound state exists for these parameters: {reason}")]
    NoBoundState { reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph violates a structural invariant: {0}")]
    InvalidGraph(String),

    #[error("edge connects coincident or light-like separated nodes (|det| = {det_abs:.3e})")]
    DegenerateEdge { det_abs: f64 },

    #[error("step rejected: time arrow violated (dt = {dt:.3e})")]
    TimeArrow { dt: f64 },

    #[error("optimum diverges: {0}")]
    DivergingOptimum(String),

    #[error("sphere grid failed verification: max residual {residual:.3e} exceeds {tolerance:.3e}")]
    GridInvalid { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
