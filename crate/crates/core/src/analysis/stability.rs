//! Linear stability of the schemes on the prototype `w' = (lambda + i mu) w`
//! with the diffusive part implicit and the rotational part explicit.
//!
//! Amplification factors are measured by running one production step on the
//! real 2x2 embedding with unit step size, so `lambda_t = lambda dt` and
//! `mu_t = mu dt` enter directly. The predictor and the limit scheme also
//! have closed forms used for cross-validation.

use num_complex::Complex64;

use crate::config::SolverConfig;
use crate::error::{Result, SolverError};
use crate::problems::linear_prototype_system;
use crate::solver::{limit_step_split, predict_split, step_split};
use crate::state::StateVector;

/// Which one-step map is being scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// The IMEX Taylor predictor alone.
    Predictor,
    /// Predictor plus the given number of correction sweeps.
    FullK(usize),
    /// The fully implicit quadrature scheme the iteration converges to.
    LimitMethod,
}

/// Closed-form predictor amplification modulus
/// `|1 + i mu_t + i mu_t lambda_t / 2 - mu_t^2 / 2| /
///  |1 - lambda_t + lambda_t^2 / 2 + i lambda_t mu_t / 2|`.
pub fn psi_modulus(lambda_t: f64, mu_t: f64) -> f64 {
    let num = Complex64::new(1.0 - mu_t * mu_t / 2.0, mu_t + mu_t * lambda_t / 2.0);
    let den = Complex64::new(
        1.0 - lambda_t + lambda_t * lambda_t / 2.0,
        lambda_t * mu_t / 2.0,
    );
    (num / den).norm()
}

/// Closed-form limit-scheme amplification modulus with
/// `zeta = lambda_t + i mu_t`:
/// `|1 + zeta/2 + zeta^2/12| / |1 - zeta/2 + zeta^2/12|`.
pub fn theta_modulus(lambda_t: f64, mu_t: f64) -> f64 {
    let zeta = Complex64::new(lambda_t, mu_t);
    let one = Complex64::new(1.0, 0.0);
    let num = one + zeta / 2.0 + zeta * zeta / 12.0;
    let den = one - zeta / 2.0 + zeta * zeta / 12.0;
    (num / den).norm()
}

const AMPLIFICATION_NEWTON_TOL: f64 = 1e-13;

/// One-step amplification `|w^1| / |w^0|` measured from the complex unit.
/// No sign restrictions are imposed so scans may probe wedge boundaries.
pub fn amplification(scheme: Scheme, lambda_t: f64, mu_t: f64) -> Result<f64> {
    let p = linear_prototype_system(lambda_t, mu_t);
    let cfg = SolverConfig::for_single_step(1.0).with_newton_tol(AMPLIFICATION_NEWTON_TOL);
    let wn = StateVector::new(vec![1.0, 0.0]);
    let w1 = match scheme {
        Scheme::Predictor => predict_split(&p, &wn, &cfg)?.0,
        Scheme::FullK(k) => step_split(&p, &wn, &cfg.with_k_max(k))?.0,
        Scheme::LimitMethod => limit_step_split(&p, &wn, &cfg)?.0,
    };
    Ok(w1.norm_l2())
}

/// Largest stable scaled rotation rate for one eigenvalue ratio, or the
/// sentinel `None` when the scheme stayed stable across the whole search
/// range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityPoint {
    pub gamma: f64,
    /// `None` means stable throughout `(0, mu_max_search]`.
    pub mu_tilde_max: Option<f64>,
    pub scheme: Scheme,
}

const AMP_SLACK: f64 = 1e-12;
const SCAN_GRID: usize = 10_000;
const BISECT_TOL: f64 = 1e-4;

/// Scans each ratio `gamma = lambda / mu <= 0` for the largest `mu_t` such
/// that the one-step amplification stays below `1 + 1e-12` everywhere up to
/// it. The range is first swept on a uniform grid (monotonicity is not
/// assumed), then the first crossing is refined by bisection to 1e-4.
pub fn stability_scan(
    scheme: Scheme,
    gammas: &[f64],
    mu_max_search: f64,
) -> Result<Vec<StabilityPoint>> {
    if !(mu_max_search > 0.0) || !mu_max_search.is_finite() {
        return Err(SolverError::InvalidParameter(format!(
            "search cap must be positive and finite, got {mu_max_search}"
        )));
    }
    let mut out = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        if !(gamma <= 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "eigenvalue ratio must be <= 0, got {gamma}"
            )));
        }
        let unstable = |mu: f64| -> Result<bool> {
            Ok(amplification(scheme, gamma * mu, mu)? > 1.0 + AMP_SLACK)
        };

        let mut bracket: Option<(f64, f64)> = None;
        let mut last_stable = 0.0;
        for i in 1..=SCAN_GRID {
            let mu = mu_max_search * i as f64 / SCAN_GRID as f64;
            if unstable(mu)? {
                bracket = Some((last_stable, mu));
                break;
            }
            last_stable = mu;
        }
        let mu_tilde_max = match bracket {
            None => None,
            Some((mut lo, mut hi)) => {
                while hi - lo > BISECT_TOL {
                    let mid = 0.5 * (lo + hi);
                    if unstable(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Some(0.5 * (lo + hi))
            }
        };
        out.push(StabilityPoint {
            gamma,
            mu_tilde_max,
            scheme,
        });
    }
    Ok(out)
}

/// Default ratio grid: forty log-spaced values of `-gamma` from 1e-3 to 10.
pub fn default_gammas() -> Vec<f64> {
    (0..40)
        .map(|i| -(10f64.powf(-3.0 + 4.0 * i as f64 / 39.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictor_amplification_exceeds_one_on_the_imaginary_axis() {
        // |Psi(0, mu)|^2 = (1 - mu^2/2)^2 + mu^2 = 1 + mu^4/4.
        for &mu in &[0.25, 1.0, 2.0, 5.0] {
            let a = psi_modulus(0.0, mu);
            let expected = (1.0 + mu.powi(4) / 4.0).sqrt();
            assert!((a - expected).abs() <= 1e-12 * expected);
            assert!(a > 1.0);
        }
    }

    #[test]
    fn numerical_predictor_matches_closed_form() {
        for i in 0..20 {
            for j in 0..20 {
                let lt = -10.0 + 10.0 * i as f64 / 19.0;
                let mt = 10.0 * (j + 1) as f64 / 20.0;
                let num = amplification(Scheme::Predictor, lt, mt).unwrap();
                let cf = psi_modulus(lt, mt);
                assert!((num - cf).abs() <= 1e-11, "lt={lt} mt={mt}: {num} vs {cf}");
            }
        }
    }

    #[test]
    fn numerical_limit_scheme_matches_closed_form() {
        for i in 0..20 {
            for j in 0..20 {
                let lt = -10.0 + 10.0 * i as f64 / 19.0;
                let mt = 10.0 * (j + 1) as f64 / 20.0;
                let num = amplification(Scheme::LimitMethod, lt, mt).unwrap();
                let cf = theta_modulus(lt, mt);
                assert!((num - cf).abs() <= 1e-11, "lt={lt} mt={mt}: {num} vs {cf}");
            }
        }
    }

    #[test]
    fn limit_scheme_is_stable_for_negative_ratios() {
        for i in 0..20 {
            let gamma = -(10f64.powf(-3.0 + 4.0 * i as f64 / 19.0));
            for j in 0..20 {
                let mu = 100.0 * (j + 1) as f64 / 20.0;
                let a = theta_modulus(gamma * mu, mu);
                assert!(a <= 1.0 + 1e-12, "gamma={gamma} mu={mu}: {a}");
            }
        }
    }

    #[test]
    fn predictor_stability_polynomial_identity() {
        // |num|^2 - |den|^2 of the predictor equals the printed quartic
        // (1-g^4)/4 m^4 + (g^3+g) m^3 - 2 g^2 m^2 + 2 g m exactly.
        for &gamma in &[-2.0, -1.0, -0.5, -0.1, -0.01] {
            for j in 1..=40 {
                let m = 6.0 * j as f64 / 40.0;
                let lt = gamma * m;
                let num2 = (1.0 - m * m / 2.0).powi(2) + (m + lt * m / 2.0).powi(2);
                let den2 = (1.0 - lt + lt * lt / 2.0).powi(2) + (lt * m / 2.0).powi(2);
                let quartic = (1.0 - gamma.powi(4)) / 4.0 * m.powi(4)
                    + (gamma.powi(3) + gamma) * m.powi(3)
                    - 2.0 * gamma * gamma * m * m
                    + 2.0 * gamma * m;
                let lhs = num2 - den2;
                assert!(
                    (lhs - quartic).abs() <= 1e-10 * quartic.abs().max(1.0),
                    "gamma={gamma} m={m}: {lhs} vs {quartic}"
                );
            }
        }
    }

    #[test]
    fn two_sweep_amplification_matches_printed_polynomial_at_gamma_zero() {
        // Squared amplification minus one at lambda = 0 is
        // m^6 (m^6 + 76 m^4 + 1392 m^2 - 7488) / 82944.
        for &m in &[0.5f64, 1.0, 1.5, 2.0, 2.2] {
            let a = amplification(Scheme::FullK(2), 0.0, m).unwrap();
            let poly =
                m.powi(6) * (m.powi(6) + 76.0 * m.powi(4) + 1392.0 * m * m - 7488.0) / 82944.0;
            assert!(
                (a * a - 1.0 - poly).abs() <= 1e-10,
                "m={m}: amp^2-1 = {} vs {poly}",
                a * a - 1.0
            );
        }
    }

    #[test]
    fn predictor_boundary_shrinks_towards_gamma_zero() {
        let pts = stability_scan(Scheme::Predictor, &[-1e-3, -1e-1], 50.0).unwrap();
        let near_zero = pts[0].mu_tilde_max.expect("bounded near gamma = 0");
        let moderate = pts[1].mu_tilde_max.expect("bounded at gamma = -0.1");
        assert!(near_zero < moderate, "expected {near_zero} < {moderate}");
    }

    #[test]
    fn predictor_is_stable_for_ratios_at_or_below_minus_one() {
        let pts = stability_scan(Scheme::Predictor, &[-1.0, -4.0], 50.0).unwrap();
        assert!(pts.iter().all(|p| p.mu_tilde_max.is_none()), "{pts:?}");
    }

    #[test]
    fn positive_ratio_is_rejected() {
        assert!(stability_scan(Scheme::Predictor, &[0.5], 10.0).is_err());
        assert!(stability_scan(Scheme::Predictor, &[-1.0], 0.0).is_err());
    }
}
