//! Time-harmonic expansion of a causal cubic response. For origin fields
//! e^{−iω_j t} A_j(ρt) run through a memory kernel that factors per slot,
//!
//!   ∫ K(s⃗) ∏ e^{−iω_j(t−s_j)} A_j(ρt − ρs_j) ds⃗
//!     = e^{−i(Σω_j)t} Σ_{l̄} ρ^{|l̄|} χ_{l̄}(ω⃗) ∏ A_j^{(l_j)}(ρt) ,
//!
//! with the slot moments (1/l! absorbed, matching the modal susceptibility
//! convention)
//!
//!   χ_{l̄}(ω⃗) = r₀ ∏_j (1/l_j!) ∫ (−s)^{l_j} k(s) e^{iω_j s} ds .
//!
//! The exponential kernel has the closed form (−1)^{|l̄|} r₀ / ∏ (c − iω_j)^{l_j+1};
//! tabulated kernels are integrated by composite Simpson with a nested error
//! estimate that refuses under-resolved grids.

use crate::scalar::{lit, Real};
use crate::{Error, Result, C};

#[derive(Clone, Debug)]
pub enum ResponseKernel<T: Real> {
    /// k(s) = e^{−rate·s} on s ≥ 0.
    Exponential { rate: T, r0: T },
    /// Uniform samples of k(s) on [0, s_max]; the grid must have 4n+1
    /// points so the error estimate can halve it.
    Tabulated { s_max: T, k: Vec<T>, r0: T },
}

impl<T: Real> ResponseKernel<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            ResponseKernel::Exponential { rate, .. } => {
                if !(*rate > T::zero()) {
                    return Err(Error::Config("kernel rate must be positive".into()));
                }
            }
            ResponseKernel::Tabulated { s_max, k, .. } => {
                if !(*s_max > T::zero()) {
                    return Err(Error::Config("kernel support must be positive".into()));
                }
                if k.len() < 5 || (k.len() - 1) % 4 != 0 {
                    return Err(Error::Config(format!(
                        "tabulated kernel needs 4n+1 samples, got {}",
                        k.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Composite Simpson over a uniform complex-valued sample array.
fn simpson_c<T: Real>(vals: &[C<T>], h: T) -> C<T> {
    let n = vals.len();
    debug_assert!(n >= 3 && n % 2 == 1);
    let mut acc = vals[0] + vals[n - 1];
    for (i, v) in vals.iter().enumerate().take(n - 1).skip(1) {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + *v * lit::<T>(w);
    }
    acc * h / lit::<T>(3.0)
}

/// Slot moment (1/l!) ∫ (−s)^l k(s) e^{iωs} ds for a tabulated kernel, with
/// a |fine − coarse|/15 Simpson error estimate.
fn tabulated_moment<T: Real>(
    s_max: T,
    k: &[T],
    l: usize,
    omega: T,
) -> (C<T>, f64) {
    let n = k.len();
    let h = s_max / lit::<T>((n - 1) as f64);
    let mut fact = T::one();
    for m in 1..=l {
        fact *= lit::<T>(m as f64);
    }
    let sample = |i: usize| -> C<T> {
        let s = h * lit::<T>(i as f64);
        let phase = omega * s;
        let mut w = k[i] / fact;
        // (−s)^l
        for _ in 0..l {
            w = w * (-s);
        }
        C::new(phase.cos(), phase.sin()) * w
    };
    let fine: Vec<C<T>> = (0..n).map(sample).collect();
    let coarse: Vec<C<T>> = (0..n).step_by(2).map(sample).collect();
    let vf = simpson_c(&fine, h);
    let vc = simpson_c(&coarse, h * lit::<T>(2.0));
    let err = (vf - vc).norm().as_f64() / 15.0;
    (vf, err)
}

/// χ_{l̄}(ω⃗): the derivative-coupling coefficient of the slow-time expansion.
pub fn harmonic_expand<T: Real>(
    kernel: &ResponseKernel<T>,
    omegas: [T; 3],
    l: [usize; 3],
    tol: f64,
) -> Result<C<T>> {
    kernel.validate()?;
    match kernel {
        ResponseKernel::Exponential { rate, r0 } => {
            let mut out = C::new(*r0, T::zero());
            for j in 0..3 {
                let pole = C::new(*rate, -omegas[j]);
                for _ in 0..=l[j] {
                    out = out / pole;
                }
                if l[j] % 2 == 1 {
                    out = -out;
                }
            }
            Ok(out)
        }
        ResponseKernel::Tabulated { s_max, k, r0 } => {
            let mut out = C::new(*r0, T::zero());
            let mut err_total = 0.0;
            for j in 0..3 {
                let (m, e) = tabulated_moment(*s_max, k, l[j], omegas[j]);
                err_total = err_total * m.norm().as_f64() + e * out.norm().as_f64();
                out = out * m;
            }
            if err_total > tol {
                return Err(Error::Solver(format!(
                    "tabulated kernel moments resolved to {err_total:e} > tol {tol:e}; \
                     refine the sample grid"
                )));
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excitation::EnvelopeSpec;
    use crate::util::fit::loglog_fit;
    use crate::util::quad::integrate_osc_c;
    use crate::{tol, C64};
    use approx::assert_abs_diff_eq;

    #[test]
    fn exponential_moments_frozen() {
        let k = ResponseKernel::Exponential { rate: 1.0, r0: 1.0 };
        let chi0 = harmonic_expand(&k, [0.0; 3], [0, 0, 0], 1e-12).unwrap();
        assert_abs_diff_eq!(chi0.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chi0.im, 0.0, epsilon = 1e-15);
        let chi100 = harmonic_expand(&k, [0.0; 3], [1, 0, 0], 1e-12).unwrap();
        assert_abs_diff_eq!(chi100.re, -1.0, epsilon = 1e-15);
        // rate 2, l=(1,1,0): (+1) / (2² · 2² · 2) = 1/32
        let k2 = ResponseKernel::Exponential { rate: 2.0, r0: 1.0 };
        let chi110 = harmonic_expand(&k2, [0.0; 3], [1, 1, 0], 1e-12).unwrap();
        assert_abs_diff_eq!(chi110.re, 1.0 / 32.0, epsilon = 1e-15);
        // one oscillating slot: 1/(1 − i) = (1 + i)/2
        let chi_om = harmonic_expand(&k, [1.0, 0.0, 0.0], [0, 0, 0], 1e-12).unwrap();
        assert_abs_diff_eq!(chi_om.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(chi_om.im, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn matches_modal_susceptibility_kernel_path() {
        use crate::dispersion::{
            make_synthetic, FamilySpec, KernelSpec, ModelSpec, Mode, SyntheticQSpec,
        };
        // the modal q_value_l with a constant form factor is exactly the
        // kernel chi evaluated at the slot mode frequencies
        let m = make_synthetic::<f64>(&ModelSpec {
            bands: vec![FamilySpec::TwoMinusCos { a: 2.0, b: 1.0 }],
            susceptibility: SyntheticQSpec {
                q0: 1.0,
                kernel: Some(KernelSpec { rate: 1.3, amplitude: 0.7 }),
                ..Default::default()
            },
        })
        .unwrap();
        let kern = ResponseKernel::Exponential { rate: 1.3, r0: 0.7 };
        let origins = [(Mode::plus(0), 0.4), (Mode::plus(0), -0.9), (Mode::minus(0), 0.2)];
        let end = (Mode::plus(0), -0.3);
        for l in [[0, 0, 0], [1, 0, 0], [0, 2, 1]] {
            let omegas = [
                m.omega_mode(origins[0].0, origins[0].1),
                m.omega_mode(origins[1].0, origins[1].1),
                m.omega_mode(origins[2].0, origins[2].1),
            ];
            let chi = harmonic_expand(&kern, omegas, l, 1e-12).unwrap();
            let qv = m.q_value_l(end, &origins, l);
            assert_abs_diff_eq!((qv - chi).norm(), 0.0, epsilon = 1e-14);
        }
    }

    fn tabulate_exponential(rate: f64, s_max: f64, n: usize) -> ResponseKernel<f64> {
        let h = s_max / (n - 1) as f64;
        let k = (0..n).map(|i| (-rate * h * i as f64).exp()).collect();
        ResponseKernel::Tabulated { s_max, k, r0: 1.0 }
    }

    #[test]
    fn tabulated_matches_exponential_closed_form() {
        let rate = 0.8;
        let tab = tabulate_exponential(rate, 40.0, 4001);
        let exact = ResponseKernel::Exponential { rate, r0: 1.0 };
        for l in [[0, 0, 0], [1, 0, 0], [2, 1, 0]] {
            let om = [0.7, -0.3, 0.0];
            let a = harmonic_expand(&tab, om, l, 1e-5).unwrap();
            let b = harmonic_expand(&exact, om, l, 1e-12).unwrap();
            let rel = (a - b).norm() / b.norm();
            assert!(rel < 1e-5, "l={l:?}: rel {rel:e}");
        }
    }

    #[test]
    fn coarse_tabulated_grid_is_refused() {
        let tab = tabulate_exponential(0.8, 40.0, 9);
        let r = harmonic_expand(&tab, [0.7, 0.0, 0.0], [0, 0, 0], 1e-8);
        assert!(matches!(r, Err(crate::Error::Solver(_))));
        let bad = ResponseKernel::Tabulated { s_max: 1.0, k: vec![1.0; 8], r0: 1.0 };
        assert!(matches!(
            harmonic_expand(&bad, [0.0; 3], [0, 0, 0], 1e-3),
            Err(crate::Error::Config(_))
        ));
    }

    #[test]
    fn reality_pairing_of_moments() {
        let tab = tabulate_exponential(1.1, 40.0, 2001);
        for l in [[0, 0, 0], [1, 2, 0]] {
            let a = harmonic_expand(&tab, [0.9, -0.4, 0.2], l, 1e-4).unwrap();
            let b = harmonic_expand(&tab, [-0.9, 0.4, -0.2], l, 1e-4).unwrap();
            assert_abs_diff_eq!((a - b.conj()).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn truncation_order_controls_slope_in_rho() {
        // scalar single-slot version of the expansion: the exact causal
        // convolution against a slow envelope vs the N1-truncated series
        //   Σ_{n≤N1} (−ρ)ⁿ ψ⁽ⁿ⁾(ρt) / (c − iω)^{n+1} .
        // The first omitted term sets the slope: N1 + 1.
        let env = EnvelopeSpec::<f64>::new(0.1).unwrap();
        let (c, om) = (1.0, 0.9);
        let pole = C64::new(c, -om);
        let tau_eval = 0.035; // strictly inside the ramp: psi', psi'' nonzero
        let rhos: Vec<f64> = (0..5).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
        for (n1, want, tol_slope) in [
            (0usize, 1.0, tol::HARMONIC_SLOPE_TOL_N0),
            (1, 2.0, tol::HARMONIC_SLOPE_TOL_N1),
        ] {
            let mut errs = Vec::new();
            for &rho in &rhos {
                let t = tau_eval / rho;
                let s_hi = (t).min(40.0 / c);
                let mut f = |s: f64| {
                    let decay = (-c * s).exp();
                    C64::new((om * s).cos(), (om * s).sin())
                        * (decay * env.psi(rho * (t - s)))
                };
                let (exact, _) = integrate_osc_c(&mut f, 0.0, s_hi, om.abs(), 1e-12);
                let derivs =
                    [env.psi(tau_eval), env.psi0(tau_eval), env.psi0_prime(tau_eval)];
                let mut series = C64::new(0.0, 0.0);
                let mut pref = C64::new(1.0, 0.0) / pole;
                for (n, d) in derivs.iter().take(n1 + 1).enumerate() {
                    series += pref * (-rho).powi(n as i32) * *d;
                    pref = pref / pole;
                }
                errs.push((exact - series).norm());
            }
            let fit = loglog_fit(&rhos, &errs);
            assert!(
                (fit.slope - want).abs() < tol_slope,
                "N1={n1}: slope {} want {want} (errs {errs:?})",
                fit.slope
            );
        }
    }
}
