//! Almost time-harmonic, almost single-mode excitation currents.
//!
//! A doublet excitation drives the two combined modes (±, n0) near ±k_star
//! with a slowly ramped current whose momentum profile is a stretched
//! fast-decaying shape ĥ placed through the rectifying map. The ramp ψ and
//! its density ψ₀ are built from one C^∞ bump, as is the momentum cutoff Ψ₀,
//! so every window in the construction is flat to infinite order at its
//! edges.

use crate::dispersion::{DispersionModel, Sign};
use crate::rectify::RectifyMap;
use crate::scalar::{lit, Real};
use crate::util::quad::gauss15_c;
use crate::util::wrap_pi;
use crate::{Error, Result, C};
use serde::{Deserialize, Serialize};

/// exp(-1/(x(1-x))) on (0,1), zero outside. All derivatives vanish at 0, 1.
fn bump<T: Real>(x: T) -> T {
    let g = x * (T::one() - x);
    if g <= T::zero() {
        T::zero()
    } else {
        (-g.recip()).exp()
    }
}

/// d/dx of [`bump`].
fn bump_prime<T: Real>(x: T) -> T {
    let g = x * (T::one() - x);
    if g <= T::zero() {
        T::zero()
    } else {
        (-g.recip()).exp() * (T::one() - x - x) / (g * g)
    }
}

const RAMP_PANELS: usize = 2048;

/// Smooth ramp data: the bump density ψ₀ on [0, τ₀] with unit integral and
/// its cumulative ψ, which is exactly 0 for τ ≤ 0 and exactly 1 for τ ≥ τ₀.
#[derive(Clone, Debug)]
pub struct EnvelopeSpec<T: Real> {
    pub tau0: T,
    /// ∫₀¹ exp(-1/(x(1-x))) dx, evaluated at construction.
    mass: T,
    /// prefix[i] = ∫₀^{i/N} of the unit bump.
    prefix: Vec<T>,
}

impl<T: Real> EnvelopeSpec<T> {
    pub fn new(tau0: T) -> Result<Self> {
        if !(tau0 > T::zero()) {
            return Err(Error::Config("ramp length tau0 must be positive".into()));
        }
        let n = RAMP_PANELS;
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(T::zero());
        let mut acc = T::zero();
        for i in 0..n {
            let a = lit::<T>(i as f64 / n as f64);
            let b = lit::<T>((i + 1) as f64 / n as f64);
            acc = acc + gauss15_c(&mut |x| C::new(bump(x), T::zero()), a, b).re;
            prefix.push(acc);
        }
        Ok(Self { tau0, mass: acc, prefix })
    }

    /// Ramp density ψ₀(τ): positive on (0, τ₀), unit integral.
    pub fn psi0(&self, tau: T) -> T {
        bump(tau / self.tau0) / (self.tau0 * self.mass)
    }

    /// dψ₀/dτ, analytic.
    pub fn psi0_prime(&self, tau: T) -> T {
        bump_prime(tau / self.tau0) / (self.tau0 * self.tau0 * self.mass)
    }

    /// Ramp ψ(τ) = ∫₀^τ ψ₀; identically 0 before the ramp, 1 after it.
    pub fn psi(&self, tau: T) -> T {
        let x = tau / self.tau0;
        if x <= T::zero() {
            return T::zero();
        }
        if x >= T::one() {
            return T::one();
        }
        let n = self.prefix.len() - 1;
        let j = ((x * lit::<T>(n as f64)).floor().as_f64() as usize).min(n - 1);
        let a = lit::<T>(j as f64 / n as f64);
        let tail = gauss15_c(&mut |u| C::new(bump(u), T::zero()), a, x).re;
        ((self.prefix[j] + tail) / self.mass).min(T::one())
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> i32 {
    2
}

/// Momentum profile family for ĥ₊. All members decay faster than any power;
/// the optional chirp on the Gaussian makes the profile genuinely complex,
/// which is what exercises the conjugation pairing.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HProfile {
    Gauss {
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        chirp: f64,
        #[serde(default = "one")]
        amp: f64,
    },
    Sech {
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one")]
        amp: f64,
    },
    SuperGauss {
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "two")]
        p: i32,
        #[serde(default = "one")]
        amp: f64,
    },
}

impl Default for HProfile {
    fn default() -> Self {
        HProfile::Gauss { a: 1.0, chirp: 0.0, amp: 1.0 }
    }
}

impl HProfile {
    pub fn eval<T: Real>(&self, q: T) -> C<T> {
        match *self {
            HProfile::Gauss { a, chirp, amp } => {
                let w = C::new(-lit::<T>(a), lit::<T>(chirp)) * q * q;
                C::new(lit::<T>(amp), T::zero()) * w.exp()
            }
            HProfile::Sech { a, amp } => {
                C::new(lit::<T>(amp) / (lit::<T>(a) * q).cosh(), T::zero())
            }
            HProfile::SuperGauss { a, p, amp } => {
                let r = (q * q).powi(p);
                C::new(lit::<T>(amp) * (-lit::<T>(a) * r).exp(), T::zero())
            }
        }
    }

    fn is_zero(&self) -> bool {
        matches!(
            *self,
            HProfile::Gauss { amp, .. } | HProfile::Sech { amp, .. } | HProfile::SuperGauss { amp, .. }
            if amp == 0.0
        )
    }
}

/// JSON-facing description of one doublet excitation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationSpec {
    #[serde(default)]
    pub h: HProfile,
    /// Independent ĥ₋ drops the real-field conjugation constraint; leave
    /// unset for a real excitation.
    #[serde(default)]
    pub h_minus: Option<HProfile>,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    #[serde(default = "ExcitationSpec::default_tau0")]
    pub tau0: f64,
    pub k_star: f64,
    #[serde(default)]
    pub n0: usize,
    #[serde(default = "ExcitationSpec::default_pi0")]
    pub pi0: f64,
}

impl ExcitationSpec {
    fn default_tau0() -> f64 {
        0.1
    }
    fn default_pi0() -> f64 {
        0.1
    }
}

/// A concrete doublet excitation: ramp, profiles, cutoff, carrier, scales.
#[derive(Clone, Debug)]
pub struct DoubletExcitation<T: Real> {
    pub envelope: EnvelopeSpec<T>,
    pub h_plus: HProfile,
    pub h_minus: Option<HProfile>,
    /// Cutoff radius π₀; Ψ₀ ≡ 1 inside π₀/2 and ≡ 0 outside π₀.
    pub pi0: T,
    pub k_star: T,
    pub n0: usize,
    pub alpha: T,
    pub beta: T,
    pub rho: T,
    /// Unit-interval ramp reused as the shoulder of Ψ₀.
    shoulder: EnvelopeSpec<T>,
}

impl<T: Real> DoubletExcitation<T> {
    pub fn from_spec(spec: &ExcitationSpec) -> Result<Self> {
        for (name, v) in [("beta", spec.beta), ("rho", spec.rho), ("pi0", spec.pi0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("excitation {name} must be positive")));
            }
        }
        if spec.alpha < 0.0 {
            return Err(Error::Config("excitation alpha must be nonnegative".into()));
        }
        Ok(Self {
            envelope: EnvelopeSpec::new(lit(spec.tau0))?,
            h_plus: spec.h.clone(),
            h_minus: spec.h_minus.clone(),
            pi0: lit(spec.pi0),
            k_star: lit(spec.k_star),
            n0: spec.n0,
            alpha: lit(spec.alpha),
            beta: lit(spec.beta),
            rho: lit(spec.rho),
            shoulder: EnvelopeSpec::new(T::one())?,
        })
    }

    /// ĥ_ς: the minus profile is ĥ₋(q) = ĥ₊(-q)* unless overridden.
    pub fn h_hat(&self, sign: Sign, q: T) -> C<T> {
        match sign {
            Sign::Plus => self.h_plus.eval(q),
            Sign::Minus => match &self.h_minus {
                Some(h) => h.eval(q),
                None => self.h_plus.eval(-q).conj(),
            },
        }
    }

    /// Smooth momentum cutoff Ψ₀: even, ≡1 for |η| ≤ π₀/2, ≡0 for |η| ≥ π₀.
    pub fn cutoff(&self, eta: T) -> T {
        let a = eta.abs();
        let half = self.pi0 * lit(0.5);
        if a <= half {
            T::one()
        } else if a >= self.pi0 {
            T::zero()
        } else {
            T::one() - self.shoulder.psi((a - half) / half)
        }
    }

    fn check_carrier(&self, rect: &RectifyMap<'_, T>) -> Result<()> {
        if (rect.jet.k_star - self.k_star).abs() > lit(1e-12) {
            return Err(Error::Precondition(
                "rectifying map was built at a different carrier".into(),
            ));
        }
        Ok(())
    }

    /// Current amplitude of combined mode (ς, n0) at quasimomentum k, slow
    /// time τ: -ρ ψ₀(τ) Ψ₀(k - ςk★) β⁻¹ ĥ_ς(Y_ς⁻¹(k - ςk★)/β).
    pub fn current_amplitude(
        &self,
        rect: &RectifyMap<'_, T>,
        sign: Sign,
        k: T,
        tau: T,
    ) -> Result<C<T>> {
        self.check_carrier(rect)?;
        if tau <= T::zero() || tau >= self.envelope.tau0 {
            return Ok(C::new(T::zero(), T::zero()));
        }
        let eta = wrap_pi(k - sign.scalar::<T>() * self.k_star);
        let window = self.cutoff(eta);
        if window == T::zero() {
            return Ok(C::new(T::zero(), T::zero()));
        }
        let q = rect.y_inverse_signed(sign, eta)? / self.beta;
        let scale = -self.rho * self.envelope.psi0(tau) * window / self.beta;
        Ok(self.h_hat(sign, q) * scale)
    }

    /// Slow modal amplitude of the linear response:
    /// ũ⁽⁰⁾ = ψ(τ) Ψ₀(k - ςk★) β⁻¹ ĥ_ς(Y_ς⁻¹(k - ςk★)/β).
    pub fn linear_response(
        &self,
        rect: &RectifyMap<'_, T>,
        sign: Sign,
        k: T,
        tau: T,
    ) -> Result<C<T>> {
        self.check_carrier(rect)?;
        let eta = wrap_pi(k - sign.scalar::<T>() * self.k_star);
        let window = self.cutoff(eta);
        if window == T::zero() || tau <= T::zero() {
            return Ok(C::new(T::zero(), T::zero()));
        }
        let q = rect.y_inverse_signed(sign, eta)? / self.beta;
        let scale = self.envelope.psi(tau) * window / self.beta;
        Ok(self.h_hat(sign, q) * scale)
    }

    /// Full modal coefficient Ũ⁽⁰⁾ = ũ⁽⁰⁾ e^{-iςω_{n0}(k) τ/ρ}.
    pub fn full_linear_coefficient(
        &self,
        model: &DispersionModel<T>,
        rect: &RectifyMap<'_, T>,
        sign: Sign,
        k: T,
        tau: T,
    ) -> Result<C<T>> {
        let slow = self.linear_response(rect, sign, k, tau)?;
        let omega = sign.scalar::<T>() * model.omega(self.n0, k);
        let phase = C::from_polar(T::one(), -omega * tau / self.rho);
        Ok(slow * phase)
    }
}

/// Sum of two doublet currents with carriers far enough apart that their
/// cutoff windows cannot touch.
pub fn bidirectional_current<T: Real>(
    fwd: &DoubletExcitation<T>,
    rect_fwd: &RectifyMap<'_, T>,
    bwd: &DoubletExcitation<T>,
    rect_bwd: &RectifyMap<'_, T>,
    sign: Sign,
    k: T,
    tau: T,
) -> Result<C<T>> {
    let gap = wrap_pi(fwd.k_star - bwd.k_star).abs();
    if gap <= fwd.pi0 + bwd.pi0 {
        return Err(Error::Config(format!(
            "cutoff windows overlap: carrier gap {} <= pi0 sum {}",
            gap.as_f64(),
            (fwd.pi0 + bwd.pi0).as_f64()
        )));
    }
    let skip_fwd = fwd.h_plus.is_zero() && fwd.h_minus.as_ref().is_none_or(HProfile::is_zero);
    let skip_bwd = bwd.h_plus.is_zero() && bwd.h_minus.as_ref().is_none_or(HProfile::is_zero);
    let mut total = C::new(T::zero(), T::zero());
    if !skip_fwd {
        total = total + fwd.current_amplitude(rect_fwd, sign, k, tau)?;
    }
    if !skip_bwd {
        total = total + bwd.current_amplitude(rect_bwd, sign, k, tau)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{make_synthetic, FamilySpec, ModelSpec, SyntheticQSpec};
    use crate::util::quad::integrate_r;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn model() -> DispersionModel<f64> {
        make_synthetic(&ModelSpec {
            bands: vec![FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 }],
            susceptibility: SyntheticQSpec::default(),
        })
        .unwrap()
    }

    fn spec(k_star: f64) -> ExcitationSpec {
        ExcitationSpec {
            h: HProfile::Gauss { a: 1.0, chirp: 0.7, amp: 1.0 },
            h_minus: None,
            alpha: 1e-3,
            beta: 0.05,
            rho: 2.5e-3,
            tau0: 0.1,
            k_star,
            n0: 0,
            pi0: 0.1,
        }
    }

    fn setup() -> (DispersionModel<f64>, DoubletExcitation<f64>) {
        let m = model();
        let exc = DoubletExcitation::from_spec(&spec(PI / 3.0)).unwrap();
        (m, exc)
    }

    fn rect_at(m: &DispersionModel<f64>, k_star: f64) -> RectifyMap<'_, f64> {
        let jet = m.jet_at(0, k_star).unwrap();
        RectifyMap::new(m, jet, 2, 0.1).unwrap()
    }

    #[test]
    fn ramp_has_unit_mass_and_exact_plateau() {
        let env = EnvelopeSpec::<f64>::new(0.1).unwrap();
        let (mass, _) = integrate_r(&mut |t| env.psi0(t), 0.0, 0.1, 1e-12);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        assert_eq!(env.psi(-1e-9), 0.0);
        assert_eq!(env.psi(0.0), 0.0);
        assert_eq!(env.psi(0.1), 1.0);
        assert_eq!(env.psi(0.35), 1.0);
        let mid = env.psi(0.05);
        assert_abs_diff_eq!(mid, 0.5, epsilon = 1e-12); // bump is symmetric
        for i in 1..10 {
            let tau = 0.01 * i as f64;
            assert!(env.psi0(tau) >= 0.0);
            assert!(env.psi(tau) >= 0.0 && env.psi(tau) <= 1.0);
        }
        // unit-bump mass, frozen: int_0^1 exp(-1/(x(1-x))) dx
        assert_abs_diff_eq!(env.mass, 7.0298584066e-3, epsilon = 1e-12);
    }

    #[test]
    fn psi0_prime_matches_finite_differences() {
        let env = EnvelopeSpec::<f64>::new(0.1).unwrap();
        for tau in [0.02, 0.05, 0.083] {
            let h = 1e-6;
            let fd = (env.psi0(tau + h) - env.psi0(tau - h)) / (2.0 * h);
            let rel = (env.psi0_prime(tau) - fd).abs() / fd.abs().max(1.0);
            assert!(rel < 1e-7, "tau={tau}: analytic {} fd {fd}", env.psi0_prime(tau));
        }
    }

    #[test]
    fn psi_derivative_is_psi0() {
        let env = EnvelopeSpec::<f64>::new(0.1).unwrap();
        for tau in [0.013, 0.05, 0.092] {
            let h = 1e-6;
            let fd = (env.psi(tau + h) - env.psi(tau - h)) / (2.0 * h);
            assert_abs_diff_eq!(fd, env.psi0(tau), epsilon = 1e-6 * env.psi0(tau).max(1.0));
        }
    }

    #[test]
    fn cutoff_plateau_support_and_evenness() {
        let (_, exc) = setup();
        assert_eq!(exc.cutoff(0.0), 1.0);
        assert_eq!(exc.cutoff(0.049), 1.0);
        assert_eq!(exc.cutoff(0.1), 0.0);
        assert_eq!(exc.cutoff(0.13), 0.0);
        for eta in [0.055, 0.07, 0.09] {
            let v = exc.cutoff(eta);
            assert!(v > 0.0 && v < 1.0);
            assert_abs_diff_eq!(v, exc.cutoff(-eta), epsilon = 0.0);
        }
        // flat to infinite order entering the shoulder
        assert!(exc.cutoff(0.0502) > 1.0 - 1e-12);
        assert!(exc.cutoff(0.0998) < 1e-12);
    }

    #[test]
    fn current_vanishes_outside_ramp_and_window() {
        let (m, exc) = setup();
        let rect = rect_at(&m, PI / 3.0);
        let k = PI / 3.0 + 0.01;
        assert_eq!(exc.current_amplitude(&rect, Sign::Plus, k, 0.15).unwrap().norm(), 0.0);
        assert_eq!(exc.current_amplitude(&rect, Sign::Plus, k, -0.01).unwrap().norm(), 0.0);
        assert_eq!(exc.current_amplitude(&rect, Sign::Plus, k, 0.1).unwrap().norm(), 0.0);
        let far = PI / 3.0 + 0.11;
        assert_eq!(exc.current_amplitude(&rect, Sign::Plus, far, 0.05).unwrap().norm(), 0.0);
        let inside = exc.current_amplitude(&rect, Sign::Plus, k, 0.05).unwrap();
        assert!(inside.norm() > 0.0);
    }

    #[test]
    fn reality_pairing_on_a_grid() {
        let (m, exc) = setup();
        let rect = rect_at(&m, PI / 3.0);
        for i in 0..17 {
            let eta = -0.095 + 0.19 * i as f64 / 16.0;
            for tau in [0.02, 0.06] {
                let jp = exc
                    .current_amplitude(&rect, Sign::Plus, PI / 3.0 + eta, tau)
                    .unwrap();
                let jm = exc
                    .current_amplitude(&rect, Sign::Minus, -(PI / 3.0 + eta), tau)
                    .unwrap();
                assert_abs_diff_eq!(jm.re, jp.re, epsilon = 1e-12);
                assert_abs_diff_eq!(jm.im, -jp.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn linear_response_is_integrated_current() {
        let (m, exc) = setup();
        let rect = rect_at(&m, PI / 3.0);
        let k = PI / 3.0 - 0.02;
        for tau in [0.04, 0.07, 0.2] {
            let u = exc.linear_response(&rect, Sign::Plus, k, tau).unwrap();
            let j = crate::util::quad::integrate_c(
                &mut |t| exc.current_amplitude(&rect, Sign::Plus, k, t).unwrap(),
                0.0,
                tau.min(0.1),
                1e-12,
            )
            .0;
            let via_current = -j / exc.rho;
            assert_abs_diff_eq!(u.re, via_current.re, epsilon = 1e-9);
            assert_abs_diff_eq!(u.im, via_current.im, epsilon = 1e-9);
        }
    }

    #[test]
    fn response_frozen_after_ramp_and_tail_tiny() {
        let (m, exc) = setup();
        let rect = rect_at(&m, PI / 3.0);
        let k = PI / 3.0 + 0.03;
        let a = exc.linear_response(&rect, Sign::Plus, k, 0.1).unwrap();
        let b = exc.linear_response(&rect, Sign::Plus, k, 0.9).unwrap();
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 0.0);
        // Gaussian tail: widen the window so the profile decay is what binds
        let mut wide = spec(PI / 3.0);
        wide.pi0 = 0.6;
        wide.h = HProfile::Gauss { a: 1.0, chirp: 0.0, amp: 1.0 };
        let exc_w = DoubletExcitation::from_spec(&wide).unwrap();
        let rect_w = {
            let jet = m.jet_at(0, PI / 3.0).unwrap();
            RectifyMap::new(&m, jet, 2, 0.6).unwrap()
        };
        let far = exc_w
            .linear_response(&rect_w, Sign::Plus, PI / 3.0 + 0.52, 0.2)
            .unwrap();
        assert!(far.norm() < 1e-12, "tail {}", far.norm());
        assert!(exc_w.cutoff(0.52) > 0.0, "cutoff must not be the binding factor");
    }

    #[test]
    fn full_coefficient_carries_mode_phase() {
        let (m, exc) = setup();
        let rect = rect_at(&m, PI / 3.0);
        let k = PI / 3.0 + 0.01;
        let tau = 0.2;
        let slow = exc.linear_response(&rect, Sign::Plus, k, tau).unwrap();
        let full = exc.full_linear_coefficient(&m, &rect, Sign::Plus, k, tau).unwrap();
        let phase = C::from_polar(1.0, -m.omega(0, k) * tau / exc.rho);
        assert_abs_diff_eq!((full - slow * phase).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn bidirectional_reduces_and_separates() {
        let m = model();
        let fwd = DoubletExcitation::from_spec(&spec(PI / 3.0)).unwrap();
        let mut bspec = spec(-PI / 3.0);
        bspec.h = HProfile::Gauss { a: 1.5, chirp: -0.3, amp: 0.8 };
        let bwd = DoubletExcitation::from_spec(&bspec).unwrap();
        let rf = rect_at(&m, PI / 3.0);
        let rb = rect_at(&m, -PI / 3.0);
        let k_near_b = -PI / 3.0 + 0.02;
        let tau = 0.05;
        let combined =
            bidirectional_current(&fwd, &rf, &bwd, &rb, Sign::Plus, k_near_b, tau).unwrap();
        let alone = bwd.current_amplitude(&rb, Sign::Plus, k_near_b, tau).unwrap();
        assert_abs_diff_eq!((combined - alone).norm(), 0.0, epsilon = 1e-15);
        // zero backward amplitude degenerates to the forward doublet
        let mut zspec = bspec.clone();
        zspec.h = HProfile::Gauss { a: 1.5, chirp: -0.3, amp: 0.0 };
        let zero_b = DoubletExcitation::from_spec(&zspec).unwrap();
        let k_near_f = PI / 3.0 - 0.01;
        let red =
            bidirectional_current(&fwd, &rf, &zero_b, &rb, Sign::Plus, k_near_f, tau).unwrap();
        let fwd_alone = fwd.current_amplitude(&rf, Sign::Plus, k_near_f, tau).unwrap();
        assert_abs_diff_eq!((red - fwd_alone).norm(), 0.0, epsilon = 0.0);
        // combined current keeps the conjugation pairing
        for i in 0..9 {
            let k = -PI + 2.0 * PI * i as f64 / 9.0;
            let jp = bidirectional_current(&fwd, &rf, &bwd, &rb, Sign::Plus, k, tau).unwrap();
            let jm = bidirectional_current(&fwd, &rf, &bwd, &rb, Sign::Minus, -k, tau).unwrap();
            assert_abs_diff_eq!(jm.re, jp.re, epsilon = 1e-12);
            assert_abs_diff_eq!(jm.im, -jp.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn overlapping_windows_rejected() {
        let m = model();
        let a = DoubletExcitation::from_spec(&spec(0.08)).unwrap();
        let b = DoubletExcitation::from_spec(&spec(-0.08)).unwrap();
        let ra = rect_at(&m, 0.08);
        let rb = rect_at(&m, -0.08);
        let r = bidirectional_current(&a, &ra, &b, &rb, Sign::Plus, 0.0, 0.05);
        assert!(r.is_err());
    }

    #[test]
    fn carrier_mismatch_rejected() {
        let (m, exc) = setup();
        let wrong = rect_at(&m, PI / 3.0 + 0.05);
        assert!(exc.current_amplitude(&wrong, Sign::Plus, PI / 3.0, 0.05).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn reality_pairing_holds_everywhere(
                k in -3.1f64..3.1,
                tau in -0.05f64..0.2,
                chirp in -2.0f64..2.0,
                pick in 0usize..3,
            ) {
                let m = model();
                let mut s = spec(PI / 3.0);
                s.h = match pick {
                    0 => HProfile::Gauss { a: 1.2, chirp, amp: 0.9 },
                    1 => HProfile::Sech { a: 1.0, amp: 1.1 },
                    _ => HProfile::SuperGauss { a: 0.8, p: 2, amp: 1.0 },
                };
                let exc = DoubletExcitation::from_spec(&s).unwrap();
                let rect = rect_at(&m, PI / 3.0);
                let jp = exc.current_amplitude(&rect, Sign::Plus, k, tau).unwrap();
                let jm = exc.current_amplitude(&rect, Sign::Minus, -k, tau).unwrap();
                prop_assert!((jm - jp.conj()).norm() <= 1e-12);
                // support in time and momentum
                if !(0.0..0.1).contains(&tau) {
                    prop_assert_eq!(jp.norm(), 0.0);
                }
                if wrap_pi(k - PI / 3.0).abs() >= 0.1 {
                    prop_assert_eq!(jp.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn ramp_spectrum_width_scales_with_rho() {
        use rustfft::FftPlanner;
        let env = EnvelopeSpec::<f64>::new(0.1).unwrap();
        let n = 2048usize;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let c_of_rho = |rho: f64| -> f64 {
            let t_end = 1.0 / rho;
            let dt = t_end / n as f64;
            // park the carrier half a bin off the grid: worst-case leakage,
            // and the same fractional offset for every rho
            let m0 = (1.5 / (2.0 * PI * rho)).round();
            let omega0 = 2.0 * PI * rho * (m0 + 0.5);
            let mut buf: Vec<C<f64>> = (0..n)
                .map(|i| {
                    let t = i as f64 * dt;
                    C::from_polar(env.psi(rho * t), -omega0 * t)
                })
                .collect();
            fft.process(&mut buf);
            let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
            let mut pairs: Vec<(f64, f64)> = buf
                .iter()
                .enumerate()
                .map(|(m, z)| {
                    let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                    // forward DFT kernel is e^{-2pi i m i/n}, so the
                    // e^{-i omega0 t} carrier lands at the bin -omega0
                    let omega = -2.0 * PI * signed / t_end;
                    ((omega - omega0).abs(), z.norm_sqr())
                })
                .collect();
            pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut acc = 0.0;
            for (dist, e) in pairs {
                acc += e;
                if acc >= 0.99 * total {
                    return dist / rho;
                }
            }
            unreachable!()
        };
        let cs: Vec<f64> = [1e-3, 1e-2, 1e-1].map(c_of_rho).to_vec();
        let cmax = cs.iter().cloned().fold(0.0, f64::max);
        let cmin = cs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(cmax / cmin < 1.3, "bandwidth constant unstable: {cs:?}");
        assert!(cmax < 250.0, "bandwidth constant too large: {cs:?}");
    }
}
