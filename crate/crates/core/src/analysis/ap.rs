//! Stiffness-limit residual probes.
//!
//! For well-prepared data the algebraic constraint `g(y, z) = 0` is
//! reproduced by the discrete solution as the stiffness parameter shrinks at
//! fixed step size: the largest `|g(y^n, z^n)|` seen over a run must decay
//! at least linearly in `epsilon`. Ill-prepared data is the negative
//! control; its residual stays order one.

use crate::config::SolverConfig;
use crate::error::{Result, SolverError};
use crate::problem::TwoDerivProblem;
use crate::solver::integrate_two_deriv;

/// Max-over-steps constraint residuals per stiffness value, with the fitted
/// log-log decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ApResidualSweep {
    /// `(epsilon, max_n |g(y^n, z^n)|)`, one entry per requested stiffness.
    pub points: Vec<(f64, f64)>,
    /// Slope of `ln residual` against `ln epsilon`.
    pub slope: f64,
}

/// Runs the integrator once per stiffness value at fixed `cfg.dt` and
/// records the largest constraint residual over all time levels, the
/// initial one included.
pub fn ap_residual_sweep<F>(
    family: F,
    cfg: &SolverConfig,
    epsilons: &[f64],
) -> Result<ApResidualSweep>
where
    F: Fn(f64) -> Result<TwoDerivProblem>,
{
    if epsilons.len() < 2 {
        return Err(SolverError::InvalidParameter(
            "need at least two stiffness values to fit a decay rate".into(),
        ));
    }
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let p = family(eps)?;
        let out = integrate_two_deriv(&p, cfg)?;
        let max_resid = out
            .states
            .iter()
            .map(|w| p.g_at(w[0], w[1]).abs())
            .fold(0.0f64, f64::max);
        if !max_resid.is_finite() {
            return Err(SolverError::NonFinite {
                context: "constraint residual",
            });
        }
        points.push((eps, max_resid));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.max(f64::MIN_POSITIVE)).collect();
    let slope = super::loglog_slope(&xs, &ys);
    Ok(ApResidualSweep { points, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{van_der_pol, VanDerPolSpec};

    #[test]
    fn large_stiffness_parameter_gives_order_one_residual() {
        let cfg = SolverConfig::new(1e-2, 0.1).unwrap().with_k_max(2);
        let sweep = ap_residual_sweep(
            |eps| van_der_pol(VanDerPolSpec { epsilon: eps }),
            &cfg,
            &[1.0, 0.5],
        )
        .unwrap();
        // No stiffness, no smallness: the constraint residual is O(1).
        assert!(sweep.points[0].1 > 1e-2, "residual {}", sweep.points[0].1);
    }

    #[test]
    fn well_prepared_residual_decays_with_epsilon() {
        let cfg = SolverConfig::new(1e-2, 0.1).unwrap().with_k_max(2);
        let sweep = ap_residual_sweep(
            |eps| van_der_pol(VanDerPolSpec { epsilon: eps }),
            &cfg,
            &[1e-3, 1e-4, 1e-5],
        )
        .unwrap();
        assert!(sweep.slope >= 0.9, "slope {}", sweep.slope);
    }

    #[test]
    fn ill_prepared_residual_does_not_decay() {
        let cfg = SolverConfig::new(1e-2, 0.1).unwrap().with_k_max(2);
        let sweep = ap_residual_sweep(
            |eps| {
                let mut p = van_der_pol(VanDerPolSpec { epsilon: eps })?;
                p.initial.1 += 0.1;
                Ok(p)
            },
            &cfg,
            &[1e-3, 1e-4, 1e-5],
        )
        .unwrap();
        assert!(sweep.slope.abs() <= 0.2, "slope {}", sweep.slope);
    }

    #[test]
    fn single_epsilon_is_rejected() {
        let cfg = SolverConfig::new(1e-2, 0.1).unwrap();
        assert!(ap_residual_sweep(
            |eps| van_der_pol(VanDerPolSpec { epsilon: eps }),
            &cfg,
            &[1e-3],
        )
        .is_err());
    }
}
