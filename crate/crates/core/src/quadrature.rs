//! Two-point quadrature with endpoint derivatives.
//!
//! The update rules integrate the right-hand side over one step with the
//! corrected trapezoidal rule
//!
//! ```text
//! I[f_l, f_r] = dt/2 (f_l + f_r) + dt^2/12 (fdot_l - fdot_r),
//! ```
//!
//! which is exact for cubics and fourth-order accurate per step.

use crate::error::{Result, SolverError};
use crate::state::{lincomb, StateVector};

/// Endpoint values and endpoint time derivatives of the integrand over one
/// step of width `dt`.
#[derive(Debug, Clone)]
pub struct QuadratureInput {
    pub f_left: StateVector,
    pub f_right: StateVector,
    pub fdot_left: StateVector,
    pub fdot_right: StateVector,
    pub dt: f64,
}

impl QuadratureInput {
    pub fn validate(&self) -> Result<()> {
        let d = self.f_left.dim();
        if self.f_right.dim() != d || self.fdot_left.dim() != d || self.fdot_right.dim() != d {
            return Err(SolverError::InvalidParameter(
                "quadrature inputs must share one dimension".into(),
            ));
        }
        Ok(())
    }
}

/// Applies the rule componentwise:
/// `dt/2 (f_left + f_right) + dt^2/12 (fdot_left - fdot_right)`.
pub fn quadrature(q: &QuadratureInput) -> Result<StateVector> {
    q.validate()?;
    let half = q.dt / 2.0;
    let twelfth = q.dt * q.dt / 12.0;
    Ok(lincomb(&[
        (half, &q.f_left),
        (half, &q.f_right),
        (twelfth, &q.fdot_left),
        (-twelfth, &q.fdot_right),
    ]))
}

/// Scalar form of [`quadrature`], used by the scalar stage updates.
#[inline]
pub fn quadrature_scalar(
    f_left: f64,
    f_right: f64,
    fdot_left: f64,
    fdot_right: f64,
    dt: f64,
) -> f64 {
    dt / 2.0 * (f_left + f_right) + dt * dt / 12.0 * (fdot_left - fdot_right)
}
