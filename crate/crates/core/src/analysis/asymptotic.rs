//! Decomposition of the end-time error into powers of the stiffness
//! parameter.
//!
//! With `delta(dt, eps) = delta0(dt) + eps delta1(dt) + O(eps^2)`, runs at
//! three geometrically spaced stiffness values `eps, alpha eps, alpha^2 eps`
//! isolate the leading coefficients:
//!
//! ```text
//! delta0     ~ (delta(dt, alpha eps) - alpha delta(dt, eps)) / (1 - alpha)
//! eps delta1 ~ w1 delta(dt, eps) + w2 delta(dt, alpha eps) + w3 delta(dt, alpha^2 eps)
//! ```
//!
//! where the weights solve `w1 + w2 + w3 = 0`, `w1 + alpha w2 + alpha^2 w3 = 1`,
//! `w1 + alpha^2 w2 + alpha^4 w3 = 0`.

use crate::analysis::convergence::{reference_solution, ReferenceCache};
use crate::config::SolverConfig;
use crate::error::{Result, SolverError};
use crate::linalg::{lu_solve, Matrix};
use crate::problems::TestProblem;

/// Coefficients extracted at one step size.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticDecomposition {
    pub dt: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub alpha: f64,
    pub epsilon_base: f64,
    pub omega: [f64; 3],
}

/// Solves the 3x3 weight system for a given `alpha` in (0, 1).
pub fn omega_weights(alpha: f64) -> Result<[f64; 3]> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SolverError::InvalidParameter(format!(
            "alpha must lie strictly between 0 and 1, got {alpha}"
        )));
    }
    let a2 = alpha * alpha;
    let m = Matrix::from_rows(&[&[1.0, 1.0, 1.0], &[1.0, alpha, a2], &[1.0, a2, a2 * a2]]);
    let w = lu_solve(&m, &[0.0, 1.0, 0.0])?;
    Ok([w[0], w[1], w[2]])
}

/// Leading coefficient from two stiffness values.
pub fn delta0_two_point(delta_eps: f64, delta_alpha_eps: f64, alpha: f64) -> f64 {
    (delta_alpha_eps - alpha * delta_eps) / (1.0 - alpha)
}

/// End-time error of one run against its reference.
fn delta_at(
    family: &TestProblem,
    cfg: &SolverConfig,
    eps: f64,
    dt_min: f64,
    cache: &mut ReferenceCache,
) -> Result<f64> {
    let problem = family.instantiate(eps)?;
    let reference = reference_solution(cache, &problem, cfg.t_end, dt_min)?;
    let out = problem.integrate(cfg)?;
    Ok(out.final_state().dist_l2(&reference))
}

/// Extracts `delta0` and `delta1` at every step size. Each `dt` costs three
/// solves, at `eps`, `alpha eps` and `alpha^2 eps`.
pub fn asymptotic_decompose(
    family: &TestProblem,
    cfg_base: &SolverConfig,
    dts: &[f64],
    alpha: f64,
    epsilon_base: f64,
    k_max: usize,
) -> Result<Vec<AsymptoticDecomposition>> {
    if !(epsilon_base > 0.0) {
        return Err(SolverError::InvalidParameter(format!(
            "epsilon_base must be positive, got {epsilon_base}"
        )));
    }
    let omega = omega_weights(alpha)?;
    let dt_min = dts.iter().copied().fold(f64::INFINITY, f64::min);
    if !(dt_min > 0.0) {
        return Err(SolverError::InvalidParameter(
            "step sizes must be positive".into(),
        ));
    }

    let mut cache = ReferenceCache::new();
    let mut out = Vec::with_capacity(dts.len());
    for &dt in dts {
        let mut cfg = cfg_base.clone();
        cfg.dt = dt;
        cfg.k_max = k_max;
        let d0 = delta_at(family, &cfg, epsilon_base, dt_min, &mut cache)?;
        let d1 = delta_at(family, &cfg, alpha * epsilon_base, dt_min, &mut cache)?;
        let d2 = delta_at(
            family,
            &cfg,
            alpha * alpha * epsilon_base,
            dt_min,
            &mut cache,
        )?;
        let delta0 = delta0_two_point(d0, d1, alpha);
        let delta1 = (omega[0] * d0 + omega[1] * d1 + omega[2] * d2) / epsilon_base;
        out.push(AsymptoticDecomposition {
            dt,
            delta0,
            delta1,
            alpha,
            epsilon_base,
            omega,
        });
    }
    Ok(out)
}
