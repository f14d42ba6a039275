//! Brute-force evaluation of the interaction integrals. Everything here is
//! reference-grade: adaptive nested quadrature with explicit oscillation
//! budgets, no asymptotics. The spectral cutoff is replaced by 1 — the
//! amplitudes we integrate decay fast enough that the cutoff tail is below
//! the quadrature tolerance, and dropping it keeps the oracle independent of
//! the window geometry.

use crate::scalar::{lit, Real};
use crate::util::quad::{integrate_c, integrate_osc_c};
use crate::{Error, Result, C};

/// Hard cap on the estimated panel count of a nested 2D oscillatory
/// integral; beyond this the evaluation refuses rather than stalls.
pub const PANEL_BUDGET_2D: f64 = 5.0e5;

/// Grid used to bound the phase gradient before committing to quadrature.
const PHASE_SCAN: usize = 17;

/// ∫∫ A(q′, q″) e^{i λ φ(q′, q″)} dq″ dq′ over [lo0, hi0] × [lo1, hi1].
///
/// The phase gradient is bounded on a scan grid first; the bound sizes the
/// oscillation-aware panel pre-split in both directions and feeds the panel
/// budget guard. Returns the value and an absolute error estimate
/// (quadrature only — the domain truncation is the caller's business).
pub fn osc_integral_2d<T: Real>(
    amp: &mut dyn FnMut(T, T) -> C<T>,
    phase: &dyn Fn(T, T) -> T,
    lambda: T,
    lo: [T; 2],
    hi: [T; 2],
    tol: f64,
) -> Result<(C<T>, f64)> {
    let (w0, w1) = (hi[0] - lo[0], hi[1] - lo[1]);
    if !(w0 > T::zero() && w1 > T::zero()) {
        return Err(Error::Config("empty integration domain".into()));
    }
    // bound |∂φ/∂q′|, |∂φ/∂q″| by finite differences on the scan grid
    let n = PHASE_SCAN;
    let mut g0 = 0.0f64;
    let mut g1 = 0.0f64;
    let h0 = w0 / lit::<T>((n - 1) as f64);
    let h1 = w1 / lit::<T>((n - 1) as f64);
    let mut grid = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let x = lo[0] + h0 * lit::<T>(i as f64);
            let y = lo[1] + h1 * lit::<T>(j as f64);
            grid[i * n + j] = phase(x, y).as_f64();
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                g0 = g0.max((grid[(i + 1) * n + j] - grid[i * n + j]).abs() / h0.as_f64());
            }
            if j + 1 < n {
                g1 = g1.max((grid[i * n + j + 1] - grid[i * n + j]).abs() / h1.as_f64());
            }
        }
    }
    // 1.5 headroom: the scan grid underestimates the gradient between nodes
    let la = lambda.as_f64().abs();
    let dp0 = 1.5 * g0 * la;
    let dp1 = 1.5 * g1 * la;
    let panels0 = (w0.as_f64() * dp0 / std::f64::consts::FRAC_PI_4).max(1.0);
    let panels1 = (w1.as_f64() * dp1 / std::f64::consts::FRAC_PI_4).max(1.0);
    if panels0 * panels1 > PANEL_BUDGET_2D {
        return Err(Error::Solver(format!(
            "2d oscillatory quadrature needs ~{:.3e} panels (budget {:.0e}); \
             reduce lambda or the domain",
            panels0 * panels1,
            PANEL_BUDGET_2D
        )));
    }
    let inner_tol = tol / (1.0 + w0.as_f64());
    let mut inner_err_max = 0.0f64;
    let mut outer = |x: T| -> C<T> {
        let mut f = |y: T| -> C<T> {
            let ph = lambda * phase(x, y);
            amp(x, y) * C::new(ph.cos(), ph.sin())
        };
        let (v, e) = integrate_osc_c(&mut f, lo[1], hi[1], dp1, inner_tol);
        inner_err_max = inner_err_max.max(e);
        v
    };
    let (value, outer_err) = integrate_osc_c(&mut outer, lo[0], hi[0], dp0, tol);
    let err = outer_err + inner_err_max * w0.as_f64();
    Ok((value, err))
}

/// Closed form of the coupled-Gaussian spatial integral
///
///   S(λ) = ∫∫ exp(−a(q′² + q″²) + c q′ q″) e^{iλ φ_H q′ q″} dq′ dq″
///        = π / sqrt(a² − (c + iλφ_H)²/4)
///
/// valid while the quadratic form stays positive-definite (2a > |c|); the
/// determinant then has positive real part and the principal square root is
/// the right branch for every real λ.
pub fn gaussian_reference<T: Real>(a: T, c: T, phi_h: T, lambda: T) -> Result<C<T>> {
    let two = lit::<T>(2.0);
    if !(two * a > c.abs()) {
        return Err(Error::Precondition(
            "coupled gaussian needs 2a > |c| for convergence".into(),
        ));
    }
    let w = C::new(c, lambda * phi_h);
    let det = C::new(a * a, T::zero()) - w * w / lit::<T>(4.0);
    Ok(C::new(T::PI(), T::zero()) / det.sqrt())
}

/// Time-integrated FM interaction integral, brute force:
///
///   I = (1/ρ) ∫₀^τ ψ(τ₁)³ S(τ₁/θ) dτ₁ ,
///   S(λ) = ∫∫ A(q′, q″) e^{iλ Φ̊(q′, q″)} dq′ dq″ ,
///
/// with θ = ρ/β² and Φ̊ the β²-scaled phase at a fixed end offset. The
/// caller supplies the amplitude (susceptibility × spectral profiles already
/// multiplied in) and the scaled phase as closures over the offsets.
#[allow(clippy::too_many_arguments)]
pub fn quad_oracle<T: Real>(
    amp: &mut dyn FnMut(T, T) -> C<T>,
    phase: &dyn Fn(T, T) -> T,
    psi_cubed: &dyn Fn(T) -> T,
    rho: T,
    theta: T,
    tau: T,
    lo: [T; 2],
    hi: [T; 2],
    tol: f64,
) -> Result<OracleValue<T>> {
    if !(rho > T::zero() && theta > T::zero()) {
        return Err(Error::Config("rho and theta must be positive".into()));
    }
    let mut worst: Option<Error> = None;
    let mut spatial_err_max = 0.0f64;
    let mut f = |t1: T| -> C<T> {
        let w = psi_cubed(t1);
        if w == T::zero() {
            return C::new(T::zero(), T::zero());
        }
        match osc_integral_2d(amp, phase, t1 / theta, lo, hi, tol) {
            Ok((s, e)) => {
                spatial_err_max = spatial_err_max.max(e);
                s * w
            }
            Err(e) => {
                worst = Some(e);
                C::new(T::zero(), T::zero())
            }
        }
    };
    let (v, time_err) = integrate_c(&mut f, T::zero(), tau, tol);
    if let Some(e) = worst {
        return Err(e);
    }
    let value = v / rho;
    let err = (time_err + spatial_err_max * tau.as_f64()) / rho.as_f64();
    Ok(OracleValue { value, err })
}

#[derive(Clone, Copy, Debug)]
pub struct OracleValue<T: Real> {
    pub value: C<T>,
    /// Absolute quadrature error estimate.
    pub err: f64,
}

/// Non-FM estimate via one integration by parts in τ₁. For a constant
/// frequency mismatch φ the integral
///
///   I = (1/ρ) ∫₀^τ e^{iφτ₁/ρ} B(τ₁) dτ₁
///
/// splits into the boundary term K₁ = (iφ)⁻¹ e^{iφτ/ρ} B(τ) (B(0) = 0 since
/// the ramp starts from rest) and the remainder K₂ = −(iφ)⁻¹ ∫ e^{iφτ₁/ρ} B′.
/// The 1/ρ cancels against the derivative of the fast exponential, which is
/// the suppression mechanism itself.
#[derive(Clone, Copy, Debug)]
pub struct NonFmParts<T: Real> {
    pub boundary: C<T>,
    pub remainder: C<T>,
    pub value: C<T>,
    pub err: f64,
}

/// Smallest |φ| this estimate accepts; below it the "fast" phase is not
/// fast relative to the sweep ranges and the split is meaningless.
pub const PHASE_MIN: f64 = 1e-3;

pub fn nonfm_estimate<T: Real>(
    phi: T,
    rho: T,
    tau: T,
    b: &mut dyn FnMut(T) -> C<T>,
    b_prime: &mut dyn FnMut(T) -> C<T>,
    tol: f64,
) -> Result<NonFmParts<T>> {
    if phi.abs().as_f64() < PHASE_MIN {
        return Err(Error::Precondition(format!(
            "frequency mismatch {:e} below the non-FM floor {PHASE_MIN:e}",
            phi.abs().as_f64()
        )));
    }
    if !(rho > T::zero() && tau > T::zero()) {
        return Err(Error::Config("rho and tau must be positive".into()));
    }
    let i_phi = C::new(T::zero(), phi);
    let arg = phi * tau / rho;
    let boundary = C::new(arg.cos(), arg.sin()) * b(tau) / i_phi;
    let dphase = (phi / rho).abs().as_f64();
    let mut f = |t1: T| -> C<T> {
        let a = phi * t1 / rho;
        C::new(a.cos(), a.sin()) * b_prime(t1)
    };
    let (r, e) = integrate_osc_c(&mut f, T::zero(), tau, dphase, tol);
    let remainder = -(r / i_phi);
    Ok(NonFmParts {
        boundary,
        remainder,
        value: boundary + remainder,
        err: e / phi.abs().as_f64(),
    })
}

/// Direct evaluation of the same non-FM integral (cross-check path).
pub fn nonfm_direct<T: Real>(
    phi: T,
    rho: T,
    tau: T,
    b: &mut dyn FnMut(T) -> C<T>,
    tol: f64,
) -> Result<OracleValue<T>> {
    if !(rho > T::zero()) {
        return Err(Error::Config("rho must be positive".into()));
    }
    let dphase = (phi / rho).abs().as_f64();
    let mut f = |t1: T| -> C<T> {
        let a = phi * t1 / rho;
        C::new(a.cos(), a.sin()) * b(t1)
    };
    let (v, e) = integrate_osc_c(&mut f, T::zero(), tau, dphase, tol);
    Ok(OracleValue { value: v / rho, err: e / rho.as_f64() })
}
