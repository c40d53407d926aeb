//! Semi-implicit two-derivative IMEX time integration for stiff ordinary
//! differential equations.
//!
//! The stepper advances stiff relaxation systems `y' = z`,
//! `z' = g(y, z) / eps` (and, more generally, additively split systems
//! `w' = phi_e(w) + phi_i(w)`) with a second-order IMEX Taylor predictor
//! followed by implicit correction sweeps against a fourth-order two-point
//! derivative quadrature. Each sweep gains one order of accuracy up to
//! four, and the scheme retains a consistent stiff limit at fixed step size.
//!
//! Beyond the integrator itself, the crate ships the standard stiff test
//! problems (van der Pol in relaxation form, Kaps, and the linear
//! convection-diffusion prototype) and the measurement machinery used to
//! verify the solver: end-time convergence sweeps, decomposition of the
//! error into powers of the stiffness parameter, constraint-residual probes
//! of the stiff limit, and a linear stability scanner.
//!
//! ```
//! use mdimex::{integrate_split, kaps, KapsSpec, SolverConfig};
//!
//! let problem = kaps(KapsSpec { epsilon: 1e-3 }).unwrap();
//! let cfg = SolverConfig::new(1e-2, 1.0).unwrap().with_k_max(2);
//! let out = integrate_split(&problem, &cfg).unwrap();
//! let exact = (problem.exact_solution.as_ref().unwrap())(1.0);
//! assert!(out.final_state().dist_l2(&exact) < 1e-6);
//! ```

// `!(x > 0.0)` is used for parameter validation throughout: unlike
// `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
mod config;
mod error;
mod linalg;
mod newton;
mod problem;
pub mod problems;
mod quadrature;
mod solver;
mod state;
#[cfg(test)]
pub(crate) mod testutil;

pub use config::{
    SolveResult, SolverConfig, StepDiagnostics, DEFAULT_FD_JACOBIAN_STEP, DEFAULT_NEWTON_MAX_ITER,
    DEFAULT_NEWTON_TOL,
};
pub use error::{Result, SolverError};
pub use linalg::Matrix;
pub use newton::{newton_scalar, newton_solve, NewtonReport};
pub use problem::{
    total_derivative_g, total_derivative_split, HilbertInit, Problem, SplitPart, SplitProblem,
    TwoDerivProblem,
};
pub use problems::{
    kaps, linear_prototype, linear_prototype_system, van_der_pol, well_preparedness_residuals,
    KapsSpec, LinearPrototypeSpec, TestProblem, VanDerPolSpec,
};
pub use quadrature::{quadrature, quadrature_scalar, QuadratureInput};
pub use solver::{
    correct_split, correct_two_deriv, integrate_limit_split, integrate_split, integrate_two_deriv,
    limit_step_split, predict_split, predict_two_deriv, step_split, step_two_deriv,
};
pub use state::{lincomb, StateVector};
