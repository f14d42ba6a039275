//! Rectifying change of variables: a near-identity map Y on quasimomentum
//! offsets such that omega_{n0}(k_star + Y(xi)) equals the order-nu Taylor
//! polynomial gamma_(nu)(xi) exactly. Closed forms for nu = 1, 2; safeguarded
//! Newton for nu = 3, 4. The map is what lets an envelope equation with a
//! polynomial symbol track the true band to all the orders the theory needs.

use crate::dispersion::{DispersionModel, Sign, TaylorJet};
use crate::scalar::{lit, Real};
use crate::{tol, Error, Result};

/// Rectifier for one carrier and one polynomial order.
pub struct RectifyMap<'a, T: Real> {
    model: &'a DispersionModel<T>,
    pub jet: TaylorJet<T>,
    pub nu: usize,
    /// domain half-width pi0 in quasimomentum offset
    pub domain_radius: T,
    /// weak-dispersion simplification: treat Y as the identity
    pub identity: bool,
}

/// gamma_(nu)(eta) = sum_{j<=nu} omega^(j)(k_star) eta^j / j!
pub fn gamma_poly<T: Real>(jet: &TaylorJet<T>, nu: usize, eta: T) -> T {
    assert!((1..=4).contains(&nu), "polynomial order must be 1..=4");
    let mut acc = T::zero();
    for j in (0..=nu).rev() {
        acc = acc * eta + jet.gamma(j);
    }
    acc
}

impl<'a, T: Real> RectifyMap<'a, T> {
    pub fn new(
        model: &'a DispersionModel<T>,
        jet: TaylorJet<T>,
        nu: usize,
        domain_radius: T,
    ) -> Result<Self> {
        if !(1..=4).contains(&nu) {
            return Err(Error::Config(format!("rectifier order {nu} outside 1..=4")));
        }
        if jet.derivs[1] == T::zero() {
            return Err(Error::Genericity(
                "rectification needs a nonzero group velocity at the carrier".into(),
            ));
        }
        Ok(RectifyMap { model, jet, nu, domain_radius, identity: false })
    }

    pub fn with_identity(mut self, on: bool) -> Self {
        self.identity = on;
        self
    }

    pub fn gamma(&self, xi: T) -> T {
        gamma_poly(&self.jet, self.nu, xi)
    }

    fn omega_at(&self, eta: T) -> T {
        self.model.omega(self.jet.n0, self.jet.k_star + eta)
    }

    /// xi = Y^{-1}(eta).
    pub fn y_inverse(&self, eta: T) -> Result<T> {
        if self.identity {
            return Ok(eta);
        }
        let w1 = self.jet.derivs[1];
        let om0 = self.omega_at(eta) - self.jet.derivs[0];
        match self.nu {
            1 => Ok(om0 / w1),
            2 => {
                let w2 = self.jet.derivs[2];
                // solve w1 xi + w2/2 xi^2 = om0, root continuous with the
                // identity at eta = 0
                let x = lit::<T>(2.0) * w2 * om0 / (w1 * w1);
                if x.abs() < lit(1e-4) {
                    // series of (sqrt(1+x)-1)/ (x/2) to avoid cancellation
                    let corr = T::one() - x * lit(0.25) + x * x * lit(0.125)
                        - x * x * x * lit(5.0 / 64.0);
                    Ok(om0 / w1 * corr)
                } else {
                    let disc = T::one() + x;
                    if disc < T::zero() {
                        return Err(Error::Solver(
                            "rectifier discriminant negative: domain too large".into(),
                        ));
                    }
                    Ok(w1 / w2 * (disc.sqrt() - T::one()))
                }
            }
            _ => {
                let target = self.omega_at(eta);
                self.solve_monotone(|xi| self.gamma(xi) - target, eta)
            }
        }
    }

    /// eta = Y(xi), the numerical inverse of y_inverse.
    pub fn y_forward(&self, xi: T) -> Result<T> {
        if self.identity {
            return Ok(xi);
        }
        let target = self.gamma(xi);
        self.solve_monotone(|eta| self.omega_at(eta) - target, xi)
    }

    /// Signed doublet map: Y_sign(xi) = sign * Y(sign * xi); its inverse is
    /// xi = sign * Y^{-1}(sign * eta).
    pub fn y_inverse_signed(&self, sign: Sign, eta: T) -> Result<T> {
        let s = sign.scalar::<T>();
        Ok(s * self.y_inverse(s * eta)?)
    }

    pub fn y_forward_signed(&self, sign: Sign, xi: T) -> Result<T> {
        let s = sign.scalar::<T>();
        Ok(s * self.y_forward(s * xi)?)
    }

    /// Safeguarded Newton for a monotone-near-zero residual g with g(root)=0,
    /// initialized at `x0`; brackets by doubling, falls back to bisection.
    fn solve_monotone(&self, g: impl Fn(T) -> T, x0: T) -> Result<T> {
        let scale = self.jet.derivs[1].abs();
        let gtol = lit::<T>(tol::RECTIFY_NEWTON) * scale.max(T::one());
        // bracket the root around x0
        let mut w = (x0.abs() * lit(0.5)).max(self.domain_radius * lit(0.05)).max(lit(1e-6));
        let (mut a, mut b) = (x0 - w, x0 + w);
        let mut ga = g(a);
        let mut gb = g(b);
        let mut grew = 0;
        while ga * gb > T::zero() {
            w = w * lit(2.0);
            a = x0 - w;
            b = x0 + w;
            ga = g(a);
            gb = g(b);
            grew += 1;
            if grew > 40 {
                return Err(Error::Solver("rectifier root bracketing failed".into()));
            }
        }
        let _ = gb;
        let mut x = x0.max(a).min(b);
        let mut converged = false;
        for _ in 0..tol::RECTIFY_MAX_ITER {
            let gx = g(x);
            if gx * ga < T::zero() {
                b = x;
            } else {
                a = x;
                ga = gx;
            }
            // Newton step with a finite-difference slope at the working scale
            let h = ((b - a).abs() * lit(1e-3)).max(lit::<T>(1e-9) * (T::one() + x.abs()));
            let slope = (g(x + h) - g(x - h)) / (h + h);
            let mut next = if slope != T::zero() { x - gx / slope } else { (a + b) * lit(0.5) };
            if !(next >= a && next <= b) {
                next = (a + b) * lit(0.5);
            }
            let dx = (next - x).abs();
            x = next;
            if gx.abs() <= gtol || dx <= lit::<T>(tol::RECTIFY_NEWTON) * (T::one() + x.abs()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Solver("rectifier Newton did not converge".into()));
        }
        // polish to the round-off floor: the near-identity deviation scales
        // like eta^(nu+1) and drops below the nominal tolerance well inside
        // the sweep range, so the returned root must be machine-accurate
        for _ in 0..2 {
            let gx = g(x);
            let h = lit::<T>(1e-6) * (T::one() + x.abs());
            let slope = (g(x + h) - g(x - h)) / (h + h);
            if slope != T::zero() {
                let nx = x - gx / slope;
                if nx.is_finite() {
                    x = nx.max(a).min(b);
                }
            }
        }
        Ok(x)
    }

    /// max over the domain of |omega(k_star + Y(xi)) - gamma_(nu)(xi)|.
    pub fn residual_sup(&self, n_pts: usize) -> Result<T> {
        let mut worst = T::zero();
        for i in 0..n_pts {
            let xi = self.domain_radius
                * lit::<T>(-1.0 + 2.0 * i as f64 / (n_pts.max(2) - 1) as f64);
            let eta = self.y_forward(xi)?;
            let r = (self.omega_at(eta) - self.gamma(xi)).abs();
            worst = worst.max(r);
        }
        Ok(worst)
    }

    /// (eta, xi, residual) rows over the domain, for export.
    pub fn residual_sweep(&self, n_pts: usize) -> Result<Vec<(T, T, T)>> {
        let mut rows = Vec::with_capacity(n_pts);
        for i in 0..n_pts {
            let eta = self.domain_radius
                * lit::<T>(-1.0 + 2.0 * i as f64 / (n_pts.max(2) - 1) as f64);
            let xi = self.y_inverse(eta)?;
            let r = (self.omega_at(eta) - self.gamma(xi)).abs();
            rows.push((eta, xi, r));
        }
        Ok(rows)
    }
}

/// Free-function forms of the three operations (thin wrappers over the map).
pub fn y_inverse<T: Real>(
    model: &DispersionModel<T>,
    jet: &TaylorJet<T>,
    nu: usize,
    eta: T,
) -> Result<T> {
    RectifyMap::new(model, jet.clone(), nu, eta.abs().max(lit(0.1)))?.y_inverse(eta)
}

pub fn y_forward<T: Real>(
    model: &DispersionModel<T>,
    jet: &TaylorJet<T>,
    nu: usize,
    xi: T,
) -> Result<T> {
    RectifyMap::new(model, jet.clone(), nu, xi.abs().max(lit(0.1)))?.y_forward(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{make_synthetic, FamilySpec, ModelSpec, SyntheticQSpec};
    use crate::util::fit::loglog_fit_floored;
    use approx::assert_abs_diff_eq;

    fn model_of(f: FamilySpec) -> DispersionModel<f64> {
        make_synthetic(&ModelSpec { bands: vec![f], susceptibility: SyntheticQSpec::default() })
            .unwrap()
    }

    fn sqrt_model() -> DispersionModel<f64> {
        model_of(FamilySpec::Sqrt { m2: 1.0, scale: 1.0 })
    }

    fn map(m: &DispersionModel<f64>, k: f64, nu: usize) -> RectifyMap<'_, f64> {
        let jet = m.jet_at(0, k).unwrap();
        RectifyMap::new(m, jet, nu, 0.1).unwrap()
    }

    #[test]
    fn gamma_poly_sqrt_example() {
        let m = sqrt_model();
        let jet = m.jet_at(0, 1.0).unwrap();
        // sqrt(2) + 0.1/sqrt(2) + 0.01/(4 sqrt(2)) = 1.48669200744...;
        // the reference figure is printed to ~7 significant digits
        assert_abs_diff_eq!(gamma_poly(&jet, 2, 0.1), 1.4866921, epsilon = 2e-7);
        assert_abs_diff_eq!(gamma_poly(&jet, 2, 0.1), 1.4866920074447163, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma_poly(&jet, 2, 0.0), jet.derivs[0], epsilon = 1e-15);
    }

    #[test]
    fn quadratic_band_gamma_equals_band() {
        let m = model_of(FamilySpec::EvenPoly { coeffs: vec![0.0, 0.5] });
        let jet = m.jet_at(0, 1.0).unwrap();
        for i in 0..20 {
            let eta = -0.1 + 0.2 * i as f64 / 19.0;
            assert_abs_diff_eq!(
                gamma_poly(&jet, 2, eta),
                m.omega(0, 1.0 + eta),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn y11_sqrt_frozen_value() {
        let m = sqrt_model();
        let r = map(&m, 1.0, 1);
        // (sqrt(2.21) - sqrt(2)) * sqrt(2) = 0.102379604...; the reference
        // figure is printed to ~7 significant digits
        assert_abs_diff_eq!(r.y_inverse(0.1).unwrap(), 0.1023797, epsilon = 2e-7);
        assert_abs_diff_eq!(r.y_inverse(0.1).unwrap(), 0.10237960416286378, epsilon = 1e-12);
        // defining property: gamma_(1)(xi) = omega(k_star + eta)
        let xi = r.y_inverse(0.1).unwrap();
        assert_abs_diff_eq!(r.gamma(xi), m.omega(0, 1.1), epsilon = 1e-12);
    }

    #[test]
    fn quadratic_band_rectifier_is_identity() {
        let m = model_of(FamilySpec::EvenPoly { coeffs: vec![0.0, 0.5] });
        let r = map(&m, 1.0, 2);
        for i in 0..21 {
            let eta = -0.1 + 0.2 * i as f64 / 20.0;
            assert_abs_diff_eq!(r.y_inverse(eta).unwrap(), eta, epsilon = 1e-12);
        }
    }

    #[test]
    fn y21_converges_to_y11_as_curvature_vanishes() {
        // cos-polynomial with omega' fixed and omega'' swept toward zero
        let k = 1.0f64;
        let (c, s) = (k.cos(), k.sin());
        let target_w1 = -0.8;
        for (eps, bound) in [(1e-3, 1e-5), (1e-5, 1e-7), (1e-7, 1e-9)] {
            // solve -s c1 - 2 s c c2 = w1, -c c1 - (4c^2-2) c2 = eps
            let det = s * (4.0 * c * c - 2.0) - 2.0 * s * c * c;
            let c1 = (-(4.0 * c * c - 2.0) * target_w1 + 2.0 * s * c * eps) / det;
            let c2 = (c * target_w1 - s * eps) / det;
            let m = model_of(FamilySpec::CosPoly { coeffs: vec![5.0, c1, c2] });
            let jet = m.jet_at(0, k).unwrap();
            assert_abs_diff_eq!(jet.derivs[1], target_w1, epsilon = 1e-10);
            assert_abs_diff_eq!(jet.derivs[2], eps, epsilon = 1e-10);
            let r2 = RectifyMap::new(&m, jet.clone(), 2, 0.1).unwrap();
            let r1 = RectifyMap::new(&m, jet, 1, 0.1).unwrap();
            let d = (r2.y_inverse(0.08).unwrap() - r1.y_inverse(0.08).unwrap()).abs();
            assert!(d < bound, "omega''={eps}: |Y21-Y11| = {d} >= {bound}");
        }
    }

    #[test]
    fn round_trip_and_fixed_point() {
        let m = model_of(FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 });
        for nu in 1..=4 {
            let r = map(&m, std::f64::consts::PI / 3.0, nu);
            assert_abs_diff_eq!(r.y_forward(0.0).unwrap(), 0.0, epsilon = 1e-12);
            for i in 0..15 {
                let eta = -0.1 + 0.2 * i as f64 / 14.0;
                let xi = r.y_inverse(eta).unwrap();
                let back = r.y_forward(xi).unwrap();
                assert_abs_diff_eq!(back, eta, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn residual_meets_tolerance_for_all_families_and_orders() {
        let fams = [
            FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 },
            FamilySpec::Sqrt { m2: 1.0, scale: 1.0 },
            FamilySpec::CosPoly { coeffs: vec![2.5, -1.0, -0.3] },
        ];
        let ks = [std::f64::consts::PI / 3.0, 1.0, 0.9];
        for (f, k) in fams.into_iter().zip(ks) {
            let m = model_of(f);
            for nu in 1..=4 {
                let r = map(&m, k, nu);
                let res = r.residual_sup(41).unwrap();
                assert!(res <= tol::RECTIFY_RESIDUAL, "nu={nu}: residual {res}");
            }
        }
    }

    #[test]
    fn near_identity_slope_is_nu_plus_one() {
        let m = model_of(FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 });
        for nu in 1..=4usize {
            let r = map(&m, std::f64::consts::PI / 3.0, nu);
            let etas: Vec<f64> = (0..9).map(|i| 1e-3 * 10f64.powf(2.0 * i as f64 / 8.0)).collect();
            let devs: Vec<f64> = etas
                .iter()
                .map(|&e| (r.y_inverse(e).unwrap() - e).abs())
                .collect();
            // eta^5 dips under the f64 round-off floor at the bottom of the
            // sweep; censor those samples rather than fit noise
            let (fit, kept) = loglog_fit_floored(&etas, &devs, 1e-14);
            assert!(kept >= 6, "nu={nu}: only {kept} points above floor");
            assert!(
                (fit.slope - (nu as f64 + 1.0)).abs() <= tol::RECTIFY_SLOPE_TOL,
                "nu={nu}: slope {}",
                fit.slope
            );
        }
    }

    #[test]
    fn leading_deviation_coefficient_matches_next_taylor_term() {
        // Forward: Y(xi) = xi + Xi xi^{nu+1} + ... with omega' Xi + gamma_{nu+1} = 0,
        // so the inverse deviates the other way: Y^{-1}(eta) - eta ~ -Xi eta^{nu+1}.
        let m = model_of(FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 });
        let k = std::f64::consts::PI / 3.0;
        let jet = m.jet_at(0, k).unwrap();
        for nu in 1..=4usize {
            let r = map(&m, k, nu);
            let gamma_next = if nu < 4 {
                jet.gamma(nu + 1)
            } else {
                let mut f = 1.0;
                for i in 1..=5 {
                    f *= i as f64;
                }
                jet.fifth.unwrap() / f
            };
            let xi_fwd = -gamma_next / jet.derivs[1];
            let eta = 1e-2;
            let fwd = (r.y_forward(eta).unwrap() - eta) / eta.powi(nu as i32 + 1);
            let rel_f = ((fwd - xi_fwd) / xi_fwd).abs();
            assert!(rel_f < 0.05, "nu={nu}: forward Xi measured {fwd} expect {xi_fwd}");
            let inv = (r.y_inverse(eta).unwrap() - eta) / eta.powi(nu as i32 + 1);
            let rel_i = ((inv + xi_fwd) / xi_fwd).abs();
            assert!(rel_i < 0.05, "nu={nu}: inverse Xi measured {inv} expect {}", -xi_fwd);
        }
    }

    #[test]
    fn doublet_antisymmetry() {
        // omega_{sign}(sign k_star + Y_sign(xi)) = sign gamma_(nu)(sign xi)
        let m = model_of(FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 });
        let r = map(&m, std::f64::consts::PI / 3.0, 3);
        for i in 0..11 {
            let xi = -0.1 + 0.2 * i as f64 / 10.0;
            for sign in [Sign::Plus, Sign::Minus] {
                let s = sign.scalar::<f64>();
                let eta_s = r.y_forward_signed(sign, xi).unwrap();
                let k = s * r.jet.k_star + eta_s;
                let lhs = s * m.omega(0, k);
                let rhs = s * r.gamma(s * xi);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
                // and the signed inverse undoes the signed forward
                let xi_back = r.y_inverse_signed(sign, eta_s).unwrap();
                assert_abs_diff_eq!(xi_back, xi, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn identity_switch_bypasses_the_map() {
        let m = model_of(FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 });
        let jet = m.jet_at(0, std::f64::consts::PI / 3.0).unwrap();
        let r = RectifyMap::new(&m, jet, 2, 0.1).unwrap().with_identity(true);
        assert_eq!(r.y_inverse(0.07).unwrap(), 0.07);
        assert_eq!(r.y_forward(0.07).unwrap(), 0.07);
    }

    #[test]
    fn zero_group_velocity_rejected() {
        let m = model_of(FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 });
        let jet = m.jet_at(0, 0.0).unwrap();
        assert!(RectifyMap::new(&m, jet, 2, 0.1).is_err());
    }
}
