//! Damped Newton iteration with finite-difference Jacobians.
//!
//! The stage equations hand Newton a residual whose root is the implicit
//! stage value. Jacobians are always formed by forward differences of the
//! residual; the solver never asks the user for second derivatives.

use crate::config::SolverConfig;
use crate::error::{Result, SolverError};
use crate::linalg::{lu_solve, Matrix};
use crate::state::StateVector;

/// Outcome of one Newton solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub converged: bool,
}

const MAX_HALVINGS: u32 = 8;

fn effective_tol(tol: f64, x: &StateVector) -> f64 {
    tol * (1.0 + x.norm_inf())
}

/// Solves `residual(x) = 0` starting from `guess`.
///
/// Policy: full Newton step if it reduces the residual infinity norm, else
/// the step is halved up to eight times; convergence when the residual
/// infinity norm drops below `newton_tol * (1 + |x|_inf)`. The Jacobian is
/// re-formed by forward differences every iteration.
pub fn newton_solve<F>(
    residual: F,
    guess: &StateVector,
    cfg: &SolverConfig,
) -> Result<(StateVector, NewtonReport)>
where
    F: Fn(&StateVector) -> Result<StateVector>,
{
    let dim = guess.dim();
    let mut x = guess.clone();
    let mut r = residual(&x)?;
    if r.dim() != dim {
        return Err(SolverError::InvalidParameter(
            "residual must preserve dimension".into(),
        ));
    }
    let mut rnorm = r.norm_inf();

    for it in 0..=cfg.newton_max_iter {
        if rnorm <= effective_tol(cfg.newton_tol, &x) {
            return Ok((
                x,
                NewtonReport {
                    iterations: it,
                    final_residual_norm: rnorm,
                    converged: true,
                },
            ));
        }
        if it == cfg.newton_max_iter {
            break;
        }

        // Forward-difference Jacobian around the current iterate.
        let mut jac = Matrix::zeros(dim, dim);
        for j in 0..dim {
            let h = cfg.fd_jacobian_step * (1.0 + x[j].abs());
            let mut xp = x.clone();
            xp[j] += h;
            let rp = residual(&xp)?;
            for i in 0..dim {
                jac.set(i, j, (rp[i] - r[i]) / h);
            }
        }
        let step = lu_solve(&jac, r.as_slice())?;

        // Damping: accept the first scaled step that reduces the residual;
        // after eight halvings take the smallest candidate regardless and
        // let the iteration budget decide.
        let mut alpha = 1.0;
        let mut accepted: Option<(StateVector, StateVector, f64)> = None;
        for halving in 0..=MAX_HALVINGS {
            let mut xt = x.clone();
            for i in 0..dim {
                xt[i] -= alpha * step[i];
            }
            match residual(&xt) {
                Ok(rt) => {
                    let rtn = rt.norm_inf();
                    if rtn < rnorm || halving == MAX_HALVINGS {
                        accepted = Some((xt, rt, rtn));
                        break;
                    }
                }
                Err(_) if halving < MAX_HALVINGS => {}
                Err(e) => return Err(e),
            }
            alpha *= 0.5;
        }
        let (xt, rt, rtn) = accepted.expect("loop always selects a candidate");
        x = xt;
        r = rt;
        rnorm = rtn;
    }

    Err(SolverError::NewtonDidNotConverge {
        iterations: cfg.newton_max_iter,
        final_residual_norm: rnorm,
    })
}

/// Scalar specialization of [`newton_solve`] with the same policy.
pub fn newton_scalar<F>(residual: F, guess: f64, cfg: &SolverConfig) -> Result<(f64, NewtonReport)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut x = guess;
    let mut r = residual(x)?;
    let mut rnorm = r.abs();

    for it in 0..=cfg.newton_max_iter {
        if rnorm <= cfg.newton_tol * (1.0 + x.abs()) {
            return Ok((
                x,
                NewtonReport {
                    iterations: it,
                    final_residual_norm: rnorm,
                    converged: true,
                },
            ));
        }
        if it == cfg.newton_max_iter {
            break;
        }

        let h = cfg.fd_jacobian_step * (1.0 + x.abs());
        let slope = (residual(x + h)? - r) / h;
        if slope.abs() <= 1e-14 * slope.abs().max(rnorm).max(1.0) {
            return Err(SolverError::SingularJacobian);
        }
        let step = r / slope;

        let mut alpha = 1.0;
        let mut accepted: Option<(f64, f64, f64)> = None;
        for halving in 0..=MAX_HALVINGS {
            let xt = x - alpha * step;
            match residual(xt) {
                Ok(rt) => {
                    let rtn = rt.abs();
                    if rtn < rnorm || halving == MAX_HALVINGS {
                        accepted = Some((xt, rt, rtn));
                        break;
                    }
                }
                Err(_) if halving < MAX_HALVINGS => {}
                Err(e) => return Err(e),
            }
            alpha *= 0.5;
        }
        let (xt, rt, rtn) = accepted.expect("loop always selects a candidate");
        x = xt;
        r = rt;
        rnorm = rtn;
    }

    Err(SolverError::NewtonDidNotConverge {
        iterations: cfg.newton_max_iter,
        final_residual_norm: rnorm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::for_single_step(1.0)
    }

    #[test]
    fn shift_residual_converges_in_one_iteration() {
        // One Newton update lands on the root. The forward-difference
        // Jacobian carries ~1e-9 relative error, so resolving the root
        // beyond that costs one extra polish iteration; at a tolerance the
        // single step reaches, the count is exactly one.
        let c = StateVector::new(vec![2.5, -0.75]);
        let shift = |x: &StateVector| {
            Ok(StateVector::new(
                x.iter().zip([2.5, -0.75]).map(|(a, b)| a - b).collect(),
            ))
        };
        let loose = cfg().with_newton_tol(1e-8);
        let (root, report) = newton_solve(shift, &StateVector::zeros(2), &loose).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        assert!(root.dist_inf(&c) < 1e-7);

        let (root, report) = newton_solve(shift, &StateVector::zeros(2), &cfg()).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2);
        assert!(root.dist_inf(&c) < 1e-11);
    }

    #[test]
    fn linear_scalar_residual_matches_hand_solution() {
        // (1 + 0.1 - 0.005) z - 1 = 0 has root 1/1.095.
        let (root, report) = newton_scalar(|z| Ok(1.095 * z - 1.0), 1.0, &cfg()).unwrap();
        assert!(report.converged);
        assert!((root - 1.0 / 1.095).abs() < 1e-12, "root {root}");
    }

    #[test]
    fn quadratic_residual_from_classic_guess() {
        let (root, report) = newton_scalar(|x| Ok(x * x - 4.0), 3.0, &cfg()).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 8);
        assert!((root - 2.0).abs() < 1e-9);

        let c = cfg();
        let (root_v, report_v) = newton_solve(
            |x: &StateVector| Ok(StateVector::new(vec![x[0] * x[0] - 4.0])),
            &StateVector::new(vec![3.0]),
            &c,
        )
        .unwrap();
        assert!(report_v.converged);
        assert!(report_v.iterations <= 8);
        assert!((root_v[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn converged_report_respects_tolerance_invariant() {
        let c = cfg();
        let (root, report) = newton_scalar(|x| Ok((x - 0.3) * (x + 1.1)), 1.0, &c).unwrap();
        assert!(report.converged);
        assert!(report.final_residual_norm <= c.newton_tol * (1.0 + root.abs()));
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let res = newton_solve(
            |x: &StateVector| Ok(StateVector::new(vec![x[0] - x[1], x[0] - x[1]])),
            &StateVector::new(vec![1.0, 0.0]),
            &cfg(),
        );
        assert!(matches!(res, Err(SolverError::SingularJacobian)));
    }

    #[test]
    fn iteration_budget_failure_carries_report_data() {
        let mut c = cfg();
        c.newton_max_iter = 3;
        // No real root: x^2 + 1.
        let res = newton_scalar(|x| Ok(x * x + 1.0), 2.0, &c);
        match res {
            Err(SolverError::NewtonDidNotConverge {
                iterations,
                final_residual_norm,
            }) => {
                assert_eq!(iterations, 3);
                assert!(final_residual_norm >= 1.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
