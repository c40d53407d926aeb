//! End-time error sweeps over step sizes and stiffness values.

use std::collections::HashMap;

use crate::config::SolverConfig;
use crate::error::{Result, SolverError};
use crate::problem::Problem;
use crate::problems::TestProblem;
use crate::state::StateVector;

/// One cell of a convergence sweep: the end-time Euclidean error at a given
/// `(dt, epsilon)`, plus the observed order against the previous (coarser)
/// step of the same stiffness. `error = None` marks a failed solve; the
/// sweep keeps going.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub dt: f64,
    pub epsilon: f64,
    pub error: Option<f64>,
    pub slope_vs_prev: Option<f64>,
}

/// Cache of reference end states keyed by problem label, horizon and
/// reference step, so one sweep computes each reference once.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    map: HashMap<(String, u64, u64), StateVector>,
}

impl ReferenceCache {
    pub fn new() -> Self {
        Self::default()
    }
}

const REFERENCE_NEWTON_TOL: f64 = 1e-15;

/// End state of the reference solution at `t_end`.
///
/// Problems shipping an exact solution use it directly. Otherwise the fully
/// implicit limit scheme is run at `dt_ref = min(1e-5, dt_min / 16)` with a
/// tight Newton tolerance; `dt_min` is the smallest step of the surrounding
/// study.
pub fn reference_solution(
    cache: &mut ReferenceCache,
    p: &Problem,
    t_end: f64,
    dt_min: f64,
) -> Result<StateVector> {
    if let Some(w) = p.exact_solution(t_end) {
        return Ok(w);
    }
    if t_end == 0.0 {
        return Ok(p.initial_state());
    }
    let dt_ref = 1e-5_f64.min(dt_min / 16.0).min(t_end);
    let key = (p.label().to_string(), t_end.to_bits(), dt_ref.to_bits());
    if let Some(w) = cache.map.get(&key) {
        return Ok(w.clone());
    }
    let cfg = SolverConfig::new(dt_ref, t_end)?.with_newton_tol(REFERENCE_NEWTON_TOL);
    let out = p.integrate_limit(&cfg)?;
    let w = out.final_state().clone();
    cache.map.insert(key, w.clone());
    Ok(w)
}

/// Runs the predictor-corrector over every `(dt, epsilon)` pair and records
/// the end-time error against the reference. `dts` must be positive and
/// strictly decreasing; pairwise slopes are taken within each stiffness.
pub fn convergence_study(
    family: &TestProblem,
    cfg_base: &SolverConfig,
    dts: &[f64],
    epsilons: &[f64],
    k_max: usize,
) -> Result<Vec<ConvergenceRecord>> {
    if dts.is_empty() {
        return Err(SolverError::InvalidParameter("empty step list".into()));
    }
    for pair in dts.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(SolverError::InvalidParameter(
                "step sizes must be strictly decreasing".into(),
            ));
        }
    }
    if dts.iter().any(|&dt| !(dt > 0.0)) {
        return Err(SolverError::InvalidParameter(
            "step sizes must be positive".into(),
        ));
    }

    let dt_min = *dts.last().expect("nonempty");
    let mut cache = ReferenceCache::new();
    let mut records = Vec::with_capacity(dts.len() * epsilons.len());

    for &eps in epsilons {
        let problem = family.instantiate(eps)?;
        let reference = reference_solution(&mut cache, &problem, cfg_base.t_end, dt_min)?;
        let mut prev: Option<(f64, f64)> = None;
        for &dt in dts {
            let mut cfg = cfg_base.clone();
            cfg.dt = dt;
            cfg.k_max = k_max;
            let error = match problem.integrate(&cfg) {
                Ok(out) => {
                    let e = out.final_state().dist_l2(&reference);
                    e.is_finite().then_some(e)
                }
                Err(_) => None,
            };
            let slope_vs_prev = match (prev, error) {
                (Some((dt_prev, err_prev)), Some(err)) if err > 0.0 && err_prev > 0.0 => {
                    Some((err_prev / err).ln() / (dt_prev / dt).ln())
                }
                _ => None,
            };
            prev = error.map(|e| (dt, e));
            records.push(ConvergenceRecord {
                dt,
                epsilon: eps,
                error,
                slope_vs_prev,
            });
        }
    }
    Ok(records)
}

/// Median of the pairwise slopes recorded for one stiffness value. Robust
/// against the coarsest step being pre-asymptotic and the finest touching
/// the round-off floor.
pub fn median_pairwise_slope(records: &[ConvergenceRecord], epsilon: f64) -> Option<f64> {
    let mut slopes: Vec<f64> = records
        .iter()
        .filter(|r| r.epsilon == epsilon)
        .filter_map(|r| r.slope_vs_prev)
        .collect();
    if slopes.is_empty() {
        return None;
    }
    slopes.sort_by(|a, b| a.total_cmp(b));
    let n = slopes.len();
    Some(if n % 2 == 1 {
        slopes[n / 2]
    } else {
        0.5 * (slopes[n / 2 - 1] + slopes[n / 2])
    })
}

/// Least-squares slope of `ln error` against `ln dt` over the valid cells of
/// one stiffness value.
pub fn fitted_slope(records: &[ConvergenceRecord], epsilon: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.epsilon == epsilon)
        .filter_map(|r| r.error.filter(|e| *e > 0.0).map(|e| (r.dt, e)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    Some(super::loglog_slope(&xs, &ys))
}
