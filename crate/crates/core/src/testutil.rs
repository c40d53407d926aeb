//! Test-only oracles: truncated Taylor expansion of the van der Pol flow and
//! a log-log slope fit. Kept independent of the production stepping code so
//! order measurements check the solver against a separate route.

/// Taylor coefficients of the solution of `y' = z`, `z' = ((1-y^2) z - y)/eps`
/// around `t = 0`, evaluated at `t`. The recurrence builds the series of
/// `u = y^2` and `(1-u) z - y` with Cauchy products, order by order. Valid
/// for `|t|` well below `eps`.
pub(crate) fn vdp_taylor_flow(eps: f64, y0: f64, z0: f64, t: f64, order: usize) -> (f64, f64) {
    let m = order;
    let mut a = vec![0.0; m + 1]; // y coefficients
    let mut b = vec![0.0; m + 1]; // z coefficients
    let mut u = vec![0.0; m + 1]; // y^2 coefficients
    a[0] = y0;
    b[0] = z0;
    for k in 0..m {
        u[k] = (0..=k).map(|i| a[i] * a[k - i]).sum();
        let uz_k: f64 = (0..=k).map(|i| u[i] * b[k - i]).sum();
        let v_k = b[k] - uz_k - a[k];
        a[k + 1] = b[k] / (k + 1) as f64;
        b[k + 1] = v_k / (eps * (k + 1) as f64);
    }
    let mut y = 0.0;
    let mut z = 0.0;
    for k in (0..=m).rev() {
        y = y * t + a[k];
        z = z * t + b[k];
    }
    (y, z)
}

/// Least-squares slope of `ys` against `xs` (both already in log space).
pub(crate) fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() >= 2 && xs.len() == ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_flow_satisfies_the_ode() {
        // Centered differences of the series solution reproduce the
        // right-hand side.
        let eps = 0.5;
        let (y0, z0) = (2.0, -0.66);
        let h = 1e-5;
        let (yp, zp) = vdp_taylor_flow(eps, y0, z0, h, 25);
        let (ym, zm) = vdp_taylor_flow(eps, y0, z0, -h, 25);
        let dy = (yp - ym) / (2.0 * h);
        let dz = (zp - zm) / (2.0 * h);
        assert!((dy - z0).abs() < 1e-9, "dy {dy}");
        let rhs = ((1.0 - y0 * y0) * z0 - y0) / eps;
        assert!((dz - rhs).abs() < 1e-8, "dz {dz} rhs {rhs}");
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs: Vec<f64> = (1..6).map(|i| (i as f64).ln()).collect();
        let ys: Vec<f64> = (1..6).map(|i| (i as f64).powi(3).ln()).collect();
        assert!((fit_loglog_slope(&xs, &ys) - 3.0).abs() < 1e-12);
    }
}
