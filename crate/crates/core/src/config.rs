//! Run configuration and solve output containers.

use crate::error::{Result, SolverError};
use crate::state::StateVector;

/// Time-stepping and Newton parameters for one solve.
///
/// `dt` is advisory: the integrator rounds `t_end / dt` to the nearest
/// integer number of steps `N >= 1` and re-derives the step as `t_end / N`
/// so the uniform grid lands exactly on `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Number of correction sweeps per step (zero runs the predictor alone).
    pub k_max: usize,
    /// Newton stopping threshold; the effective tolerance scales with the
    /// iterate magnitude as `newton_tol * (1 + |x|_inf)`.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Relative finite-difference step for Newton Jacobians; the per-component
    /// step is `fd_jacobian_step * (1 + |x_j|)`.
    pub fd_jacobian_step: f64,
}

pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
pub const DEFAULT_NEWTON_MAX_ITER: usize = 50;
pub const DEFAULT_FD_JACOBIAN_STEP: f64 = 1e-7;

impl SolverConfig {
    /// Validated constructor for integration runs: requires
    /// `0 < dt <= t_end`.
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SolverError::InvalidParameter(format!(
                "dt must be positive and finite, got {dt}"
            )));
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(SolverError::InvalidParameter(format!(
                "t_end must be positive and finite, got {t_end}"
            )));
        }
        if dt > t_end {
            return Err(SolverError::InvalidParameter(format!(
                "dt = {dt} exceeds t_end = {t_end}"
            )));
        }
        Ok(Self {
            dt,
            t_end,
            k_max: 0,
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max_iter: DEFAULT_NEWTON_MAX_ITER,
            fd_jacobian_step: DEFAULT_FD_JACOBIAN_STEP,
        })
    }

    /// Step-level configuration without a time horizon, for driving single
    /// predict/correct calls (dt = 0 is allowed there and acts as identity).
    pub fn for_single_step(dt: f64) -> Self {
        Self {
            dt,
            t_end: dt.max(f64::MIN_POSITIVE),
            k_max: 0,
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max_iter: DEFAULT_NEWTON_MAX_ITER,
            fd_jacobian_step: DEFAULT_FD_JACOBIAN_STEP,
        }
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_newton_tol(mut self, tol: f64) -> Self {
        self.newton_tol = tol;
        self
    }

    pub fn with_newton_max_iter(mut self, n: usize) -> Self {
        self.newton_max_iter = n;
        self
    }

    pub fn with_fd_jacobian_step(mut self, h: f64) -> Self {
        self.fd_jacobian_step = h;
        self
    }

    /// Number of uniform steps and the re-derived step size.
    pub fn normalized_grid(&self) -> Result<(usize, f64)> {
        if !(self.dt > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "dt must be positive for integration, got {}",
                self.dt
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(SolverError::InvalidParameter(
                "newton_tol must be positive".into(),
            ));
        }
        if self.newton_max_iter < 1 {
            return Err(SolverError::InvalidParameter(
                "newton_max_iter must be >= 1".into(),
            ));
        }
        let n = (self.t_end / self.dt).round().max(1.0) as usize;
        Ok((n, self.t_end / n as f64))
    }
}

/// Per-step Newton diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub predictor_residual_norm: f64,
    pub last_corrector_residual_norm: f64,
    pub newton_iterations: usize,
}

/// Output of one integration run: the uniform time grid, the state at every
/// level, and per-step Newton diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub newton_iters_total: usize,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl SolveResult {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("solve result holds >= 1 state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("solve result holds >= 1 time")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lands_exactly_on_t_end() {
        let cfg = SolverConfig::new(0.3, 1.0).unwrap();
        let (n, dt) = cfg.normalized_grid().unwrap();
        assert_eq!(n, 3);
        assert!((n as f64 * dt - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn grid_rounds_to_nearest_step_count() {
        let cfg = SolverConfig::new(0.4, 1.0).unwrap();
        let (n, _) = cfg.normalized_grid().unwrap();
        assert_eq!(n, 3); // 2.5 steps rounds up to 3
        let cfg = SolverConfig::new(0.45, 1.0).unwrap();
        let (n, _) = cfg.normalized_grid().unwrap();
        assert_eq!(n, 2); // 2.22 steps rounds down to 2
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(SolverConfig::new(0.0, 1.0).is_err());
        assert!(SolverConfig::new(-0.1, 1.0).is_err());
        assert!(SolverConfig::new(0.1, -1.0).is_err());
        assert!(SolverConfig::new(2.0, 1.0).is_err());
    }
}
