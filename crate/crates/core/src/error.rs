//! Error type shared by the solver, problem definitions and analysis tools.

use crate::config::SolveResult;
use thiserror::Error;

/// Errors produced by construction, stage solves and sweeps.
#[derive(Debug, Error)]
pub enum SolverError {
    /// A constructor or operation was handed an out-of-contract argument.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A user-supplied right-hand side (or a quantity derived from it)
    /// evaluated to NaN or infinity. The step must be aborted.
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    /// The finite-difference Jacobian inside a Newton solve lost rank
    /// (pivot below 1e-14 times the matrix scale).
    #[error("jacobian is numerically singular")]
    SingularJacobian,

    /// Newton exhausted its iteration budget above the residual tolerance.
    #[error(
        "newton did not converge after {iterations} iterations (residual {final_residual_norm:e})"
    )]
    NewtonDidNotConverge {
        iterations: usize,
        final_residual_norm: f64,
    },

    /// A time step failed mid-run; carries whatever was computed so far.
    #[error("step {step} (t = {time}) failed: {source}")]
    StepFailed {
        step: usize,
        time: f64,
        #[source]
        source: Box<SolverError>,
        partial: Box<SolveResult>,
    },

    /// The requested operation needs structure this problem does not declare
    /// (e.g. a Hilbert decomposition of the initial data).
    #[error("unsupported problem: {0}")]
    UnsupportedProblem(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
