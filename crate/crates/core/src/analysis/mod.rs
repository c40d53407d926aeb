//! Order measurements, asymptotic error decomposition, stiffness-limit
//! residual probes and linear stability scans.

mod ap;
mod asymptotic;
mod convergence;
mod stability;

pub use ap::{ap_residual_sweep, ApResidualSweep};
pub use asymptotic::{
    asymptotic_decompose, delta0_two_point, omega_weights, AsymptoticDecomposition,
};
pub use convergence::{
    convergence_study, fitted_slope, median_pairwise_slope, reference_solution, ConvergenceRecord,
    ReferenceCache,
};
pub use stability::{
    amplification, default_gammas, psi_modulus, stability_scan, theta_modulus, Scheme,
    StabilityPoint,
};

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() >= 2 && xs.len() == ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let sx: f64 = lx.iter().sum();
    let sy: f64 = ly.iter().sum();
    let sxx: f64 = lx.iter().map(|x| x * x).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
