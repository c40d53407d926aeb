//! Problem structures: the relaxation form `y' = z, z' = g(y,z)/eps` and the
//! generic additively split form `w' = phi_e(w) + phi_i(w)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::linalg::Matrix;
use crate::state::StateVector;

pub type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&StateVector) -> StateVector + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&StateVector) -> Matrix + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(f64) -> StateVector + Send + Sync>;

/// Leading Hilbert coefficients of an initial condition, declared by the
/// problem constructor. Used by the well-preparedness residual probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertInit {
    pub y0_0: f64,
    pub y0_1: f64,
    pub z0_0: f64,
    pub z0_1: f64,
}

/// The stiff relaxation problem `y' = z`, `z' = g(y, z) / epsilon`, carrying
/// `g`, its gradient and the stiffness parameter.
///
/// Instances are immutable after construction and freely shareable across
/// threads; a solve never mutates the problem.
#[derive(Clone)]
pub struct TwoDerivProblem {
    pub g: ScalarFn,
    pub grad_g: GradFn,
    pub epsilon: f64,
    pub initial: (f64, f64),
    /// Declared Hilbert decomposition of the initial condition, if any.
    pub hilbert_init: Option<HilbertInit>,
    pub label: String,
}

impl fmt::Debug for TwoDerivProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoDerivProblem")
            .field("epsilon", &self.epsilon)
            .field("initial", &self.initial)
            .field("label", &self.label)
            .finish()
    }
}

impl TwoDerivProblem {
    pub fn new(
        g: ScalarFn,
        grad_g: GradFn,
        epsilon: f64,
        initial: (f64, f64),
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(SolverError::InvalidParameter(format!(
                "epsilon must be a positive finite real, got {epsilon}"
            )));
        }
        if !initial.0.is_finite() || !initial.1.is_finite() {
            return Err(SolverError::InvalidParameter(
                "initial condition must be finite".into(),
            ));
        }
        Ok(Self {
            g,
            grad_g,
            epsilon,
            initial,
            hilbert_init: None,
            label: label.into(),
        })
    }

    pub fn with_hilbert_init(mut self, init: HilbertInit) -> Self {
        self.hilbert_init = Some(init);
        self
    }

    pub fn g_at(&self, y: f64, z: f64) -> f64 {
        (self.g)(y, z)
    }

    pub fn grad_g_at(&self, y: f64, z: f64) -> (f64, f64) {
        (self.grad_g)(y, z)
    }

    /// Rewrites the problem in split form: the non-stiff part carries `z`
    /// into the first component, the stiff part carries `g / epsilon` into
    /// the second. The split-form integrator on this embedding coincides
    /// with the native two-derivative scheme.
    pub fn to_split(&self) -> SplitProblem {
        let eps = self.epsilon;
        let g = Arc::clone(&self.g);
        let grad = Arc::clone(&self.grad_g);
        let g2 = Arc::clone(&self.g);
        let grad2 = Arc::clone(&self.grad_g);

        SplitProblem {
            dim: 2,
            phi_e: Arc::new(|w: &StateVector| StateVector::new(vec![w[1], 0.0])),
            phi_i: Arc::new(move |w: &StateVector| {
                StateVector::new(vec![0.0, g(w[0], w[1]) / eps])
            }),
            jac_phi_e: Arc::new(|_w: &StateVector| Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]])),
            jac_phi_i: Arc::new(move |w: &StateVector| {
                let (gy, gz) = grad(w[0], w[1]);
                Matrix::from_rows(&[&[0.0, 0.0], &[gy / eps, gz / eps]])
            }),
            initial: StateVector::new(vec![self.initial.0, self.initial.1]),
            exact_solution: None,
            label: format!("{}[split]", self.label),
            _grad_kept: Some(grad2),
            _g_kept: Some(g2),
        }
    }
}

/// Which part of the split right-hand side an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPart {
    Explicit,
    Implicit,
    Full,
}

/// A system `w' = phi_e(w) + phi_i(w)` with dense Jacobian access for both
/// parts. `phi_i` holds the stiff terms and is treated implicitly.
#[derive(Clone)]
pub struct SplitProblem {
    pub dim: usize,
    pub phi_e: VectorFn,
    pub phi_i: VectorFn,
    pub jac_phi_e: JacobianFn,
    pub jac_phi_i: JacobianFn,
    pub initial: StateVector,
    /// Closed-form solution when one exists (the Kaps problem ships one).
    pub exact_solution: Option<ExactFn>,
    pub label: String,
    // Keep the scalar callables alive for embeddings built from a
    // TwoDerivProblem; unused otherwise.
    _grad_kept: Option<GradFn>,
    _g_kept: Option<ScalarFn>,
}

impl fmt::Debug for SplitProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SplitProblem")
            .field("dim", &self.dim)
            .field("initial", &self.initial)
            .field("label", &self.label)
            .finish()
    }
}

impl SplitProblem {
    pub fn new(
        dim: usize,
        phi_e: VectorFn,
        phi_i: VectorFn,
        jac_phi_e: JacobianFn,
        jac_phi_i: JacobianFn,
        initial: StateVector,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(SolverError::InvalidParameter("dim must be >= 1".into()));
        }
        if initial.dim() != dim {
            return Err(SolverError::InvalidParameter(format!(
                "initial condition has dimension {}, expected {dim}",
                initial.dim()
            )));
        }
        Ok(Self {
            dim,
            phi_e,
            phi_i,
            jac_phi_e,
            jac_phi_i,
            initial,
            exact_solution: None,
            label: label.into(),
            _grad_kept: None,
            _g_kept: None,
        })
    }

    pub fn with_exact_solution(mut self, exact: ExactFn) -> Self {
        self.exact_solution = Some(exact);
        self
    }

    pub fn phi_e_at(&self, w: &StateVector) -> StateVector {
        (self.phi_e)(w)
    }

    pub fn phi_i_at(&self, w: &StateVector) -> StateVector {
        (self.phi_i)(w)
    }

    /// Full right-hand side `phi_e(w) + phi_i(w)`.
    pub fn phi_at(&self, w: &StateVector) -> StateVector {
        let e = self.phi_e_at(w);
        let i = self.phi_i_at(w);
        StateVector::new(e.iter().zip(i.iter()).map(|(a, b)| a + b).collect())
    }
}

/// Total time derivative of `g` along solutions of the relaxation system:
/// `dg/dt = d_y g * z + d_z g * g / epsilon`.
pub fn total_derivative_g(p: &TwoDerivProblem, y: f64, z: f64) -> Result<f64> {
    let g = p.g_at(y, z);
    let (gy, gz) = p.grad_g_at(y, z);
    let out = gy * z + gz * g / p.epsilon;
    if !out.is_finite() {
        return Err(SolverError::NonFinite {
            context: "total derivative of g",
        });
    }
    Ok(out)
}

/// Total time derivative of a split right-hand side part along solutions:
/// `J_part(w) * (phi_i(w) + phi_e(w))`. `Full` returns the sum of both parts.
pub fn total_derivative_split(
    p: &SplitProblem,
    w: &StateVector,
    which: SplitPart,
) -> Result<StateVector> {
    if w.dim() != p.dim {
        return Err(SolverError::InvalidParameter(format!(
            "state has dimension {}, problem expects {}",
            w.dim(),
            p.dim
        )));
    }
    let full = p.phi_at(w);
    let apply = |jac: &JacobianFn| -> Result<StateVector> {
        let out = StateVector::new(jac(w).matvec(full.as_slice()));
        if !out.is_finite() {
            return Err(SolverError::NonFinite {
                context: "total derivative of split right-hand side",
            });
        }
        Ok(out)
    };
    match which {
        SplitPart::Explicit => apply(&p.jac_phi_e),
        SplitPart::Implicit => apply(&p.jac_phi_i),
        SplitPart::Full => {
            let e = apply(&p.jac_phi_e)?;
            let i = apply(&p.jac_phi_i)?;
            Ok(StateVector::new(
                e.iter().zip(i.iter()).map(|(a, b)| a + b).collect(),
            ))
        }
    }
}

/// Either problem form, for interfaces that accept both.
#[derive(Debug, Clone)]
pub enum Problem {
    TwoDeriv(TwoDerivProblem),
    Split(SplitProblem),
}

impl Problem {
    pub fn label(&self) -> &str {
        match self {
            Problem::TwoDeriv(p) => &p.label,
            Problem::Split(p) => &p.label,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Problem::TwoDeriv(_) => 2,
            Problem::Split(p) => p.dim,
        }
    }

    pub fn initial_state(&self) -> StateVector {
        match self {
            Problem::TwoDeriv(p) => StateVector::new(vec![p.initial.0, p.initial.1]),
            Problem::Split(p) => p.initial.clone(),
        }
    }

    pub fn exact_solution(&self, t: f64) -> Option<StateVector> {
        match self {
            Problem::TwoDeriv(_) => None,
            Problem::Split(p) => p.exact_solution.as_ref().map(|f| f(t)),
        }
    }

    pub fn as_two_deriv(&self) -> Option<&TwoDerivProblem> {
        match self {
            Problem::TwoDeriv(p) => Some(p),
            Problem::Split(_) => None,
        }
    }
}
