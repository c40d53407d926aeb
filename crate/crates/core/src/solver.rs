//! The semi-implicit two-derivative predictor-corrector time stepper.
//!
//! One step from `t^n` runs a second-order IMEX Taylor predictor (forward in
//! the non-stiff variable, backward in the stiff one), then `k_max` sweeps of
//! an implicit correction built on the two-point derivative quadrature. Each
//! sweep raises the order by one until the quadrature's fourth order is
//! reached. Two equivalent forms are provided: the native scalar-pair form of
//! the relaxation system, and the general additively split form.
//!
//! Implicit stages are solved with damped Newton on a residual scaled by a
//! stiffness factor so that the residual-norm stopping rule stays meaningful
//! when `epsilon` is far below the step size; the scaling is constant during
//! a solve and leaves the Newton path itself unchanged.

use crate::config::{SolveResult, SolverConfig, StepDiagnostics};
use crate::error::{Result, SolverError};
use crate::newton::{newton_scalar, newton_solve, NewtonReport};
use crate::problem::{total_derivative_split, Problem, SplitPart, SplitProblem, TwoDerivProblem};
use crate::quadrature::{quadrature, quadrature_scalar, QuadratureInput};
use crate::state::{lincomb, StateVector};

fn eval_g(p: &TwoDerivProblem, y: f64, z: f64) -> Result<f64> {
    let g = p.g_at(y, z);
    if !g.is_finite() {
        return Err(SolverError::NonFinite { context: "g" });
    }
    Ok(g)
}

/// `dg/dt` with the `g` value already in hand; composed exactly as
/// `d_y g * z + d_z g * g / eps`.
fn eval_gdot_with(p: &TwoDerivProblem, y: f64, z: f64, g: f64) -> Result<f64> {
    let (gy, gz) = p.grad_g_at(y, z);
    let gd = gy * z + gz * g / p.epsilon;
    if !gd.is_finite() {
        return Err(SolverError::NonFinite {
            context: "total derivative of g",
        });
    }
    Ok(gd)
}

/// Magnitude of the stage residual's z-derivative at the step start,
/// `1 + dt/eps |d_z g| + dt^2/(2 eps^2) (d_z g)^2`. Dividing the residual by
/// this keeps the infinity-norm stopping rule achievable in the stiff regime.
fn stiffness_scale(p: &TwoDerivProblem, yn: f64, zn: f64, dt: f64) -> Result<f64> {
    let (_, gz) = p.grad_g_at(yn, zn);
    let eps = p.epsilon;
    let s = 1.0 + dt / eps * gz.abs() + dt * dt / (2.0 * eps * eps) * gz * gz;
    if !s.is_finite() {
        return Err(SolverError::NonFinite {
            context: "stage residual scale",
        });
    }
    Ok(s)
}

/// Predictor: explicit forward Taylor update in `y`, implicit backward
/// Taylor update in `z`:
///
/// ```text
/// y0 = yn + dt zn + dt^2/(2 eps) g(yn, zn)
/// z0 = zn + dt/eps g(y0, z0) - dt^2/(2 eps) dg/dt(y0, z0)
/// ```
///
/// Newton starts from `zn`.
pub fn predict_two_deriv(
    p: &TwoDerivProblem,
    yn: f64,
    zn: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64, NewtonReport)> {
    let dt = cfg.dt;
    let eps = p.epsilon;
    let gn = eval_g(p, yn, zn)?;
    let y0 = yn + dt * zn + dt * dt / (2.0 * eps) * gn;
    if !y0.is_finite() {
        return Err(SolverError::NonFinite {
            context: "predictor y stage",
        });
    }
    let scale = stiffness_scale(p, yn, zn, dt)?;
    let residual = |z: f64| -> Result<f64> {
        let g = eval_g(p, y0, z)?;
        let gd = eval_gdot_with(p, y0, z, g)?;
        Ok((z - zn - dt / eps * g + dt * dt / (2.0 * eps) * gd) / scale)
    };
    let (z0, report) = newton_scalar(residual, zn, cfg)?;
    Ok((y0, z0, report))
}

/// One correction sweep from iterate `(yk, zk)`.
///
/// The `y` line is explicit (no `k+1` quantity appears in it) and is
/// evaluated first; the `z` line is then solved implicitly with the fresh
/// `y` held fixed inside `g` and `dg/dt`. The quadrature of `z` uses
/// `dz/dt = g / eps`.
pub fn correct_two_deriv(
    p: &TwoDerivProblem,
    yn: f64,
    zn: f64,
    yk: f64,
    zk: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64, NewtonReport)> {
    let dt = cfg.dt;
    let eps = p.epsilon;

    let gn = eval_g(p, yn, zn)?;
    let gdn = eval_gdot_with(p, yn, zn, gn)?;
    let gk = eval_g(p, yk, zk)?;
    let gdk = eval_gdot_with(p, yk, zk, gk)?;

    let y1 = yn + quadrature_scalar(zn, zk, gn / eps, gk / eps, dt);
    if !y1.is_finite() {
        return Err(SolverError::NonFinite {
            context: "corrector y stage",
        });
    }
    let quad_g = quadrature_scalar(gn, gk, gdn, gdk, dt);
    let scale = stiffness_scale(p, yn, zn, dt)?;
    let residual = |z: f64| -> Result<f64> {
        let g = eval_g(p, y1, z)?;
        let gd = eval_gdot_with(p, y1, z, g)?;
        Ok(
            (z - zn - dt / eps * (g - gk) + dt * dt / (2.0 * eps) * (gd - gdk) - quad_g / eps)
                / scale,
        )
    };
    let (z1, report) = newton_scalar(residual, zk, cfg)?;
    Ok((y1, z1, report))
}

/// Full step: predictor followed by `cfg.k_max` correction sweeps. With
/// `k_max = 0` the result is the predictor output, bit for bit.
pub fn step_two_deriv(
    p: &TwoDerivProblem,
    yn: f64,
    zn: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64, StepDiagnostics)> {
    let (mut y, mut z, report) = predict_two_deriv(p, yn, zn, cfg)?;
    let mut diag = StepDiagnostics {
        predictor_residual_norm: report.final_residual_norm,
        last_corrector_residual_norm: report.final_residual_norm,
        newton_iterations: report.iterations,
    };
    for _ in 0..cfg.k_max {
        let (y1, z1, report) = correct_two_deriv(p, yn, zn, y, z, cfg)?;
        y = y1;
        z = z1;
        diag.last_corrector_residual_norm = report.final_residual_norm;
        diag.newton_iterations += report.iterations;
    }
    Ok((y, z, diag))
}

/// Split-form predictor:
///
/// ```text
/// w0 = wn + dt (phi_i(w0) + phi_e(wn)) + dt^2/2 (phidot_e(wn) - phidot_i(w0))
/// ```
///
/// where both total derivatives are taken along the full right-hand side.
/// Newton runs on the dim-dimensional residual with initial guess `wn`.
pub fn predict_split(
    p: &SplitProblem,
    wn: &StateVector,
    cfg: &SolverConfig,
) -> Result<(StateVector, NewtonReport)> {
    check_dim(p, wn)?;
    let dt = cfg.dt;
    let phie_n = finite_vec(p.phi_e_at(wn), "phi_e")?;
    let phidot_e_n = total_derivative_split(p, wn, SplitPart::Explicit)?;
    let scales = stage_row_scales(p, wn, dt, 0.5)?;

    let residual = |w: &StateVector| -> Result<StateVector> {
        let phii = finite_vec(p.phi_i_at(w), "phi_i")?;
        let phidot_i = total_derivative_split(p, w, SplitPart::Implicit)?;
        let raw = lincomb(&[
            (1.0, w),
            (-1.0, wn),
            (-dt, &phii),
            (-dt, &phie_n),
            (-dt * dt / 2.0, &phidot_e_n),
            (dt * dt / 2.0, &phidot_i),
        ]);
        Ok(scale_rows(raw, &scales))
    };
    newton_solve(residual, wn, cfg)
}

/// Split-form correction sweep from iterate `wk`:
///
/// ```text
/// w1 = wn + dt (phi_i(w1) - phi_i(wk)) - dt^2/2 (phidot_i(w1) - phidot_i(wk))
///         + I[phi(wn), phi(wk)]
/// ```
pub fn correct_split(
    p: &SplitProblem,
    wn: &StateVector,
    wk: &StateVector,
    cfg: &SolverConfig,
) -> Result<(StateVector, NewtonReport)> {
    check_dim(p, wn)?;
    check_dim(p, wk)?;
    let dt = cfg.dt;

    let phi_n = finite_vec(p.phi_at(wn), "phi")?;
    let phidot_n = total_derivative_split(p, wn, SplitPart::Full)?;
    let phi_k = finite_vec(p.phi_at(wk), "phi")?;
    let phidot_k = total_derivative_split(p, wk, SplitPart::Full)?;
    let phii_k = finite_vec(p.phi_i_at(wk), "phi_i")?;
    let phidot_i_k = total_derivative_split(p, wk, SplitPart::Implicit)?;

    let quad = quadrature(&QuadratureInput {
        f_left: phi_n,
        f_right: phi_k,
        fdot_left: phidot_n,
        fdot_right: phidot_k,
        dt,
    })?;
    let scales = stage_row_scales(p, wn, dt, 0.5)?;

    let residual = |w: &StateVector| -> Result<StateVector> {
        let phii = finite_vec(p.phi_i_at(w), "phi_i")?;
        let phidot_i = total_derivative_split(p, w, SplitPart::Implicit)?;
        let raw = lincomb(&[
            (1.0, w),
            (-1.0, wn),
            (-dt, &phii),
            (dt, &phii_k),
            (dt * dt / 2.0, &phidot_i),
            (-dt * dt / 2.0, &phidot_i_k),
            (-1.0, &quad),
        ]);
        Ok(scale_rows(raw, &scales))
    };
    newton_solve(residual, wk, cfg)
}

/// Full split-form step: predictor plus `cfg.k_max` correction sweeps.
pub fn step_split(
    p: &SplitProblem,
    wn: &StateVector,
    cfg: &SolverConfig,
) -> Result<(StateVector, StepDiagnostics)> {
    let (mut w, report) = predict_split(p, wn, cfg)?;
    let mut diag = StepDiagnostics {
        predictor_residual_norm: report.final_residual_norm,
        last_corrector_residual_norm: report.final_residual_norm,
        newton_iterations: report.iterations,
    };
    for _ in 0..cfg.k_max {
        let (w1, report) = correct_split(p, wn, &w, cfg)?;
        w = w1;
        diag.last_corrector_residual_norm = report.final_residual_norm;
        diag.newton_iterations += report.iterations;
    }
    Ok((w, diag))
}

/// One step of the fully implicit fourth-order quadrature scheme
///
/// ```text
/// w1 = wn + dt/2 (phi(wn) + phi(w1)) + dt^2/12 (phidot(wn) - phidot(w1)),
/// ```
///
/// the fixed point of the correction iteration. Used as the reference
/// integrator and for stability comparisons.
pub fn limit_step_split(
    p: &SplitProblem,
    wn: &StateVector,
    cfg: &SolverConfig,
) -> Result<(StateVector, NewtonReport)> {
    check_dim(p, wn)?;
    let dt = cfg.dt;
    let phi_n = finite_vec(p.phi_at(wn), "phi")?;
    let phidot_n = total_derivative_split(p, wn, SplitPart::Full)?;
    let scales = limit_row_scales(p, wn, dt)?;

    let residual = |w: &StateVector| -> Result<StateVector> {
        let phi = finite_vec(p.phi_at(w), "phi")?;
        let phidot = total_derivative_split(p, w, SplitPart::Full)?;
        let raw = lincomb(&[
            (1.0, w),
            (-1.0, wn),
            (-dt / 2.0, &phi_n),
            (-dt / 2.0, &phi),
            (-dt * dt / 12.0, &phidot_n),
            (dt * dt / 12.0, &phidot),
        ]);
        Ok(scale_rows(raw, &scales))
    };
    newton_solve(residual, wn, cfg)
}

fn check_dim(p: &SplitProblem, w: &StateVector) -> Result<()> {
    if w.dim() != p.dim {
        return Err(SolverError::InvalidParameter(format!(
            "state has dimension {}, problem expects {}",
            w.dim(),
            p.dim
        )));
    }
    Ok(())
}

fn finite_vec(v: StateVector, context: &'static str) -> Result<StateVector> {
    if !v.is_finite() {
        return Err(SolverError::NonFinite { context });
    }
    Ok(v)
}

fn scale_rows(mut v: StateVector, scales: &[f64]) -> StateVector {
    for i in 0..v.dim() {
        v[i] /= scales[i];
    }
    v
}

/// Row scales `1 + dt |J_I|_row + c2 dt^2 |J_I^2|_row` mirroring the stage
/// residual's derivative magnitude.
fn stage_row_scales(p: &SplitProblem, wn: &StateVector, dt: f64, c2: f64) -> Result<Vec<f64>> {
    let j = (p.jac_phi_i)(wn);
    let j2 = j.matmul(&j);
    row_scales_from(&j, &j2, dt, c2)
}

/// Same construction from the full Jacobian with the limit scheme's
/// coefficients `dt/2` and `dt^2/12`.
fn limit_row_scales(p: &SplitProblem, wn: &StateVector, dt: f64) -> Result<Vec<f64>> {
    let ji = (p.jac_phi_i)(wn);
    let je = (p.jac_phi_e)(wn);
    let mut j = crate::linalg::Matrix::zeros(p.dim, p.dim);
    for i in 0..p.dim {
        for k in 0..p.dim {
            j.set(i, k, ji.get(i, k) + je.get(i, k));
        }
    }
    let j2 = j.matmul(&j);
    let half = (0..p.dim)
        .map(|i| 1.0 + dt / 2.0 * j.row_abs_sum(i) + dt * dt / 12.0 * j2.row_abs_sum(i))
        .collect::<Vec<_>>();
    if half.iter().any(|s| !s.is_finite()) {
        return Err(SolverError::NonFinite {
            context: "stage residual scale",
        });
    }
    Ok(half)
}

fn row_scales_from(
    j: &crate::linalg::Matrix,
    j2: &crate::linalg::Matrix,
    dt: f64,
    c2: f64,
) -> Result<Vec<f64>> {
    let out: Vec<f64> = (0..j.nrows())
        .map(|i| 1.0 + dt * j.row_abs_sum(i) + c2 * dt * dt * j2.row_abs_sum(i))
        .collect();
    if out.iter().any(|s| !s.is_finite()) {
        return Err(SolverError::NonFinite {
            context: "stage residual scale",
        });
    }
    Ok(out)
}

enum Stepper<'a> {
    TwoDeriv(&'a TwoDerivProblem),
    Split(&'a SplitProblem),
    LimitSplit(&'a SplitProblem),
}

impl Stepper<'_> {
    fn initial(&self) -> StateVector {
        match self {
            Stepper::TwoDeriv(p) => StateVector::new(vec![p.initial.0, p.initial.1]),
            Stepper::Split(p) | Stepper::LimitSplit(p) => p.initial.clone(),
        }
    }

    fn advance(
        &self,
        w: &StateVector,
        cfg: &SolverConfig,
    ) -> Result<(StateVector, StepDiagnostics)> {
        match self {
            Stepper::TwoDeriv(p) => {
                let (y, z, diag) = step_two_deriv(p, w[0], w[1], cfg)?;
                Ok((StateVector::new(vec![y, z]), diag))
            }
            Stepper::Split(p) => step_split(p, w, cfg),
            Stepper::LimitSplit(p) => {
                let (w1, report) = limit_step_split(p, w, cfg)?;
                Ok((
                    w1,
                    StepDiagnostics {
                        predictor_residual_norm: report.final_residual_norm,
                        last_corrector_residual_norm: report.final_residual_norm,
                        newton_iterations: report.iterations,
                    },
                ))
            }
        }
    }
}

fn run_grid(stepper: Stepper<'_>, cfg: &SolverConfig) -> Result<SolveResult> {
    let (n, dt) = cfg.normalized_grid()?;
    let mut local = cfg.clone();
    local.dt = dt;

    let mut result = SolveResult {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        newton_iters_total: 0,
        diagnostics: Vec::with_capacity(n),
    };
    let w0 = stepper.initial();
    if !w0.is_finite() {
        return Err(SolverError::NonFinite {
            context: "initial condition",
        });
    }
    result.times.push(0.0);
    result.states.push(w0);

    for step in 0..n {
        let wn = result.states.last().expect("nonempty").clone();
        match stepper.advance(&wn, &local) {
            Ok((w1, diag)) if w1.is_finite() => {
                result.times.push((step + 1) as f64 * dt);
                result.states.push(w1);
                result.newton_iters_total += diag.newton_iterations;
                result.diagnostics.push(diag);
            }
            Ok(_) => {
                let time = result.final_time();
                return Err(SolverError::StepFailed {
                    step,
                    time,
                    source: Box::new(SolverError::NonFinite {
                        context: "step output",
                    }),
                    partial: Box::new(result),
                });
            }
            Err(e) => {
                let time = result.final_time();
                return Err(SolverError::StepFailed {
                    step,
                    time,
                    source: Box::new(e),
                    partial: Box::new(result),
                });
            }
        }
    }
    Ok(result)
}

/// Integrates the relaxation system over the uniform grid derived from
/// `cfg`. Deterministic: identical inputs produce bitwise-identical results.
pub fn integrate_two_deriv(p: &TwoDerivProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    run_grid(Stepper::TwoDeriv(p), cfg)
}

/// Integrates a split system over the uniform grid derived from `cfg`.
pub fn integrate_split(p: &SplitProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    run_grid(Stepper::Split(p), cfg)
}

/// Integrates a split system with the fully implicit limit scheme.
pub fn integrate_limit_split(p: &SplitProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    run_grid(Stepper::LimitSplit(p), cfg)
}

impl Problem {
    /// Runs the predictor-corrector integrator on either problem form.
    pub fn integrate(&self, cfg: &SolverConfig) -> Result<SolveResult> {
        match self {
            Problem::TwoDeriv(p) => integrate_two_deriv(p, cfg),
            Problem::Split(p) => integrate_split(p, cfg),
        }
    }

    /// Runs the fully implicit limit scheme (relaxation problems are solved
    /// through their split embedding).
    pub fn integrate_limit(&self, cfg: &SolverConfig) -> Result<SolveResult> {
        match self {
            Problem::TwoDeriv(p) => integrate_limit_split(&p.to_split(), cfg),
            Problem::Split(p) => integrate_limit_split(p, cfg),
        }
    }
}
