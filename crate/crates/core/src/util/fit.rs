//! Ordinary least squares on log-log data; every scaling-law check in the
//! acceptance gate reduces to one of these fits.

/// Result of a log10-log10 linear fit.
#[derive(Clone, Copy, Debug)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Fit log10(y) = slope * log10(x) + intercept. Panics on nonpositive data,
/// which in this codebase always indicates an upstream bug (errors and
/// amplitudes are norms).
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> SlopeFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a slope");
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            assert!(x > 0.0 && y > 0.0, "log-log fit needs positive data, got ({x}, {y})");
            (x.log10(), y.log10())
        })
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    assert!(denom.abs() > 1e-300, "degenerate abscissae");
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ybar = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - ybar).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    SlopeFit { slope, intercept, r2 }
}

/// Like [`loglog_fit`] but drops samples whose ordinate sits at or below
/// `floor` before fitting. Steep power laws (y ~ x^5) dive under the solver
/// round-off floor inside the sweep range; censoring those points keeps the
/// fit honest instead of letting noise flatten the slope. Returns the fit
/// and how many points survived.
pub fn loglog_fit_floored(xs: &[f64], ys: &[f64], floor: f64) -> (SlopeFit, usize) {
    assert_eq!(xs.len(), ys.len());
    let (fx, fy): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|&(_, &y)| y > floor)
        .map(|(&x, &y)| (x, y))
        .unzip();
    assert!(
        fx.len() >= 3,
        "only {} of {} points above the resolution floor {floor:e}",
        fx.len(),
        xs.len()
    );
    (loglog_fit(&fx, &fy), fx.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_power_law() {
        let xs: Vec<f64> = (1..=6).map(|i| 10f64.powi(-i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powf(2.5)).collect();
        let fit = loglog_fit(&xs, &ys);
        assert_abs_diff_eq!(fit.slope, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 3.7f64.log10(), epsilon = 1e-12);
        assert!(fit.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn floored_fit_censors_noise_points() {
        let xs: Vec<f64> = (1..=6).map(|i| 10f64.powi(-i)).collect();
        // bottom two samples stuck at a noise floor of 1e-13
        let ys: Vec<f64> = xs.iter().map(|x| (x.powi(3)).max(1e-13)).collect();
        let (fit, kept) = loglog_fit_floored(&xs, &ys, 5e-13);
        assert_eq!(kept, 4);
        assert_abs_diff_eq!(fit.slope, 3.0, epsilon = 1e-10);
    }
}
