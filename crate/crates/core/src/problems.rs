//! The shipped test problems: the van der Pol relaxation oscillator, the
//! Kaps system, and the linear convection-diffusion prototype.

use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::linalg::Matrix;
use crate::problem::{HilbertInit, Problem, SplitProblem, TwoDerivProblem};
use crate::state::StateVector;

/// Van der Pol in relaxation form: `g(y, z) = (1 - y^2) z - y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerPolSpec {
    pub epsilon: f64,
}

/// Kaps problem: `y' = -2y + (z^2 - y)/eps`, `z' = y - z(1 + z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KapsSpec {
    pub epsilon: f64,
}

/// Scalar prototype `w' = (lambda + i mu) w` with the diffusive part
/// `lambda w` implicit and the convective part `i mu w` explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPrototypeSpec {
    pub lambda: f64,
    pub mu: f64,
}

/// Builds the van der Pol problem with the standard stiffness-expanded
/// initial data `y(0) = 2`, `z(0) = -2/3 + (10/81) eps - (292/2187) eps^2`,
/// which is well-prepared through first order.
pub fn van_der_pol(spec: VanDerPolSpec) -> Result<TwoDerivProblem> {
    let eps = spec.epsilon;
    let z0 = -2.0 / 3.0 + 10.0 / 81.0 * eps - 292.0 / 2187.0 * eps * eps;
    Ok(TwoDerivProblem::new(
        Arc::new(|y: f64, z: f64| (1.0 - y * y) * z - y),
        Arc::new(|y: f64, z: f64| (-2.0 * y * z - 1.0, 1.0 - y * y)),
        eps,
        (2.0, z0),
        format!("van_der_pol(eps={eps:e})"),
    )?
    .with_hilbert_init(HilbertInit {
        y0_0: 2.0,
        y0_1: 0.0,
        z0_0: -2.0 / 3.0,
        z0_1: 10.0 / 81.0,
    }))
}

/// Builds the Kaps problem with the stiff terms grouped into the implicit
/// part:
///
/// ```text
/// phi_e(w) = (-2y, y - z(1 + z)),   phi_i(w) = ((z^2 - y)/eps, 0),
/// ```
///
/// initial data `(1, 1)` and exact solution `(e^{-2t}, e^{-t})` for any
/// `eps > 0`. The explicit part is chosen so that `phi_e + phi_i` matches
/// the differential equations the exact solution satisfies.
pub fn kaps(spec: KapsSpec) -> Result<SplitProblem> {
    let eps = spec.epsilon;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(SolverError::InvalidParameter(format!(
            "epsilon must be a positive finite real, got {eps}"
        )));
    }
    Ok(SplitProblem::new(
        2,
        Arc::new(|w: &StateVector| {
            let (y, z) = (w[0], w[1]);
            StateVector::new(vec![-2.0 * y, y - z * (1.0 + z)])
        }),
        Arc::new(move |w: &StateVector| {
            let (y, z) = (w[0], w[1]);
            StateVector::new(vec![(z * z - y) / eps, 0.0])
        }),
        Arc::new(|w: &StateVector| {
            let z = w[1];
            Matrix::from_rows(&[&[-2.0, 0.0], &[1.0, -1.0 - 2.0 * z]])
        }),
        Arc::new(move |w: &StateVector| {
            let z = w[1];
            Matrix::from_rows(&[&[-1.0 / eps, 2.0 * z / eps], &[0.0, 0.0]])
        }),
        StateVector::new(vec![1.0, 1.0]),
        format!("kaps(eps={eps:e})"),
    )?
    .with_exact_solution(Arc::new(|t: f64| {
        // e^{-2t} written as (e^{-t})^2 so the stiff term z^2 - y cancels
        // exactly on the trajectory even in floating point.
        let z = (-t).exp();
        StateVector::new(vec![z * z, z])
    })))
}

/// Real 2x2 embedding of the complex prototype without parameter
/// validation, for stability scans that probe the boundary of the admissible
/// wedge. `w = (u, v)` holds real and imaginary parts; the initial state is
/// the complex unit.
pub fn linear_prototype_system(lambda: f64, mu: f64) -> SplitProblem {
    SplitProblem::new(
        2,
        Arc::new(move |w: &StateVector| StateVector::new(vec![-mu * w[1], mu * w[0]])),
        Arc::new(move |w: &StateVector| StateVector::new(vec![lambda * w[0], lambda * w[1]])),
        Arc::new(move |_w: &StateVector| Matrix::from_rows(&[&[0.0, -mu], &[mu, 0.0]])),
        Arc::new(move |_w: &StateVector| Matrix::from_rows(&[&[lambda, 0.0], &[0.0, lambda]])),
        StateVector::new(vec![1.0, 0.0]),
        format!("linear_prototype(lambda={lambda:e},mu={mu:e})"),
    )
    .expect("dimension and initial state are fixed")
}

/// Validated constructor for the linear prototype (`lambda <= 0`, `mu > 0`).
pub fn linear_prototype(spec: LinearPrototypeSpec) -> Result<SplitProblem> {
    if !(spec.lambda <= 0.0) || !spec.lambda.is_finite() {
        return Err(SolverError::InvalidParameter(format!(
            "lambda must be <= 0, got {}",
            spec.lambda
        )));
    }
    if !(spec.mu > 0.0) || !spec.mu.is_finite() {
        return Err(SolverError::InvalidParameter(format!(
            "mu must be > 0, got {}",
            spec.mu
        )));
    }
    Ok(linear_prototype_system(spec.lambda, spec.mu))
}

/// Residuals of the two well-preparedness conditions on the declared Hilbert
/// decomposition of the initial data:
///
/// ```text
/// r1 = |g(y_(0), z_(0))|
/// r2 = |grad g . (z_(0), grad g . (y_(1), z_(1)))|   at (y_(0), z_(0)).
/// ```
pub fn well_preparedness_residuals(p: &TwoDerivProblem) -> Result<(f64, f64)> {
    let init = p.hilbert_init.ok_or_else(|| {
        SolverError::UnsupportedProblem(format!(
            "{} declares no Hilbert decomposition of its initial data",
            p.label
        ))
    })?;
    let r1 = p.g_at(init.y0_0, init.z0_0).abs();
    let (gy, gz) = p.grad_g_at(init.y0_0, init.z0_0);
    let inner = gy * init.y0_1 + gz * init.z0_1;
    let r2 = (gy * init.z0_0 + gz * inner).abs();
    if !r1.is_finite() || !r2.is_finite() {
        return Err(SolverError::NonFinite {
            context: "well-preparedness residuals",
        });
    }
    Ok((r1, r2))
}

/// Shipped problem families for sweeps and the command-line driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestProblem {
    VanDerPol,
    Kaps,
    /// The prototype carries its own eigenvalues; the stiffness argument of
    /// [`TestProblem::instantiate`] is ignored.
    Linear {
        lambda: f64,
        mu: f64,
    },
}

impl TestProblem {
    pub fn instantiate(&self, epsilon: f64) -> Result<Problem> {
        match self {
            TestProblem::VanDerPol => {
                Ok(Problem::TwoDeriv(van_der_pol(VanDerPolSpec { epsilon })?))
            }
            TestProblem::Kaps => Ok(Problem::Split(kaps(KapsSpec { epsilon })?)),
            TestProblem::Linear { lambda, mu } => {
                Ok(Problem::Split(linear_prototype(LinearPrototypeSpec {
                    lambda: *lambda,
                    mu: *mu,
                })?))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestProblem::VanDerPol => "vdp",
            TestProblem::Kaps => "kaps",
            TestProblem::Linear { .. } => "linear",
        }
    }
}
