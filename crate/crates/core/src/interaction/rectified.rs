//! The rectified interaction integral I^(σ): polynomial amplitude of order σ,
//! polynomial phase of order ν, spectral profiles in the rectified offsets.
//! The momentum constraint is linear in the offsets (q‴ = q − q′ − q″), which
//! conserves physical momentum up to O(β^{ν+1}) — inside the error budget of
//! every comparison made here.

use crate::dispersion::{DispersionModel, Mode, Sign};
use crate::excitation::DoubletExcitation;
use crate::interaction::oracle::{quad_oracle, OracleValue};
use crate::interaction::RectifiedPhase;
use crate::rectify::RectifyMap;
use crate::scalar::{lit, Real};
use crate::{Error, Result, C};

/// Taylor polynomial of the modal susceptibility along the FM placement,
/// in the physical offsets s⃗ = β(q′, q″, q‴):
///
///   p^[σ](s⃗) = q0 + Σⱼ a1[j] sⱼ + ½ Σᵢⱼ m2[i][j] sᵢ sⱼ   (terms up to σ).
///
/// The underlying function is the four-slot susceptibility with the end slot
/// eliminated by momentum conservation, so the coefficients mix end- and
/// origin-derivatives by the chain rule. The first two origin slots carry
/// identical modes; their coefficients are symmetrized so the evaluation is
/// exactly invariant under swapping them.
#[derive(Clone, Debug)]
pub struct PolyAmplitude<T: Real> {
    pub sigma: usize,
    pub q0: C<T>,
    pub a1: [C<T>; 3],
    pub m2: [[C<T>; 3]; 3],
}

const FD_H: f64 = 1e-4;

impl<T: Real> PolyAmplitude<T> {
    /// Build the order-σ amplitude for the doublet (sign ς, band n0, carrier
    /// k★). σ ∈ {0, 1, 2}; higher orders are never needed (σ ≤ ν − 2).
    pub fn build(
        model: &DispersionModel<T>,
        k_star: T,
        n0: usize,
        sign: Sign,
        sigma: usize,
    ) -> Result<Self> {
        if sigma > 2 {
            return Err(Error::Config(format!(
                "amplitude order {sigma} out of range (0..=2)"
            )));
        }
        let s = sign.scalar::<T>();
        let end_mode = Mode { sign, band: n0 };
        let origin_modes = [
            Mode { sign, band: n0 },
            Mode { sign, band: n0 },
            Mode { sign: sign.flip(), band: n0 },
        ];
        let base = [s * k_star, s * k_star, s * k_star, -s * k_star];
        // four-slot evaluation: x[0] end offset, x[1..4] origin offsets
        let d = |x: [T; 4]| -> C<T> {
            model.q_value(
                (end_mode, base[0] + x[0]),
                &[
                    (origin_modes[0], base[1] + x[1]),
                    (origin_modes[1], base[2] + x[2]),
                    (origin_modes[2], base[3] + x[3]),
                ],
            )
        };
        let q0 = d([T::zero(); 4]);

        let richardson =
            |coarse: C<T>, fine: C<T>| (fine * lit::<T>(4.0) - coarse) / lit::<T>(3.0);
        let grad1 = |slot: usize, h: f64| -> C<T> {
            let mut xp = [T::zero(); 4];
            let mut xm = [T::zero(); 4];
            xp[slot] = lit::<T>(h);
            xm[slot] = -lit::<T>(h);
            (d(xp) - d(xm)) / lit::<T>(2.0 * h)
        };
        let mut g = [C::new(T::zero(), T::zero()); 4];
        if sigma >= 1 {
            for (slot, gs) in g.iter_mut().enumerate() {
                *gs = richardson(grad1(slot, FD_H), grad1(slot, FD_H / 2.0));
            }
        }

        let hess1 = |i: usize, j: usize, h: f64| -> C<T> {
            if i == j {
                let mut xp = [T::zero(); 4];
                let mut xm = [T::zero(); 4];
                xp[i] = lit::<T>(h);
                xm[i] = -lit::<T>(h);
                (d(xp) - q0 * lit::<T>(2.0) + d(xm)) / lit::<T>(h * h)
            } else {
                let mut pp = [T::zero(); 4];
                let mut pm = [T::zero(); 4];
                let mut mp = [T::zero(); 4];
                let mut mm = [T::zero(); 4];
                pp[i] = lit::<T>(h);
                pp[j] = lit::<T>(h);
                pm[i] = lit::<T>(h);
                pm[j] = -lit::<T>(h);
                mp[i] = -lit::<T>(h);
                mp[j] = lit::<T>(h);
                mm[i] = -lit::<T>(h);
                mm[j] = -lit::<T>(h);
                (d(pp) - d(pm) - d(mp) + d(mm)) / lit::<T>(4.0 * h * h)
            }
        };
        let mut hess = [[C::new(T::zero(), T::zero()); 4]; 4];
        if sigma >= 2 {
            // larger step: second differences lose more bits to cancellation
            let h2 = FD_H.sqrt() * 0.1;
            for i in 0..4 {
                for j in i..4 {
                    let v = richardson(hess1(i, j, h2), hess1(i, j, h2 / 2.0));
                    hess[i][j] = v;
                    hess[j][i] = v;
                }
            }
        }

        // chain rule through x0 = s1 + s2 + s3
        let mut a1 = [C::new(T::zero(), T::zero()); 3];
        let mut m2 = [[C::new(T::zero(), T::zero()); 3]; 3];
        for j in 0..3 {
            a1[j] = g[j + 1] + g[0];
        }
        for i in 0..3 {
            for j in 0..3 {
                m2[i][j] = hess[i + 1][j + 1] + hess[0][i + 1] + hess[0][j + 1] + hess[0][0];
            }
        }
        // exact swap symmetry of the two like-sign slots
        let half = lit::<T>(0.5);
        let avg = (a1[0] + a1[1]) * half;
        a1[0] = avg;
        a1[1] = avg;
        let avg = (m2[0][2] + m2[1][2]) * half;
        m2[0][2] = avg;
        m2[1][2] = avg;
        m2[2][0] = avg;
        m2[2][1] = avg;
        let avg = (m2[0][0] + m2[1][1]) * half;
        m2[0][0] = avg;
        m2[1][1] = avg;

        Ok(PolyAmplitude { sigma, q0, a1, m2 })
    }

    /// Evaluate at physical offsets s⃗ = β(q′, q″, q‴). Terms are grouped in
    /// the symmetric primitives s₁+s₂, s₁²+s₂², s₁s₂ so that swapping the two
    /// like-sign slots is an exact floating-point identity, not just an
    /// algebraic one.
    pub fn eval(&self, s: [T; 3]) -> C<T> {
        let mut v = self.q0;
        if self.sigma >= 1 {
            v = v + self.a1[0] * (s[0] + s[1]) + self.a1[2] * s[2];
        }
        if self.sigma >= 2 {
            let half = lit::<T>(0.5);
            let sum2 = s[0] * s[0] + s[1] * s[1];
            v = v + self.m2[0][0] * sum2 * half;
            v = v + self.m2[2][2] * s[2] * s[2] * half;
            v = v + self.m2[0][1] * (s[0] * s[1]);
            v = v + self.m2[0][2] * ((s[0] + s[1]) * s[2]);
        }
        v
    }
}

/// I^(σ) at end offset q and time τ: the oracle engine run with the
/// polynomial amplitude, the order-ν polynomial phase, and the spectral
/// profiles of the doublet. No 2π factors — those live in the caller's
/// normalization of the modal expansion.
#[allow(clippy::too_many_arguments)]
pub fn rectified_integral<T: Real>(
    exc: &DoubletExcitation<T>,
    rect: &RectifyMap<'_, T>,
    poly: &PolyAmplitude<T>,
    sign: Sign,
    q: T,
    tau: T,
    radius: T,
    tol: f64,
) -> Result<OracleValue<T>> {
    let beta = exc.beta;
    let rho = exc.rho;
    let theta = rho / (beta * beta);
    let ph = RectifiedPhase::new(rect, sign, beta);
    let phase = |qp: T, qpp: T| ph.phi_ring(q, qp, qpp);
    let mut amp = |qp: T, qpp: T| -> C<T> {
        let qppp = q - qp - qpp;
        let p = poly.eval([beta * qp, beta * qpp, beta * qppp]);
        p * exc.h_hat(sign, qp) * exc.h_hat(sign, qpp) * exc.h_hat(sign.flip(), qppp)
    };
    let env = &exc.envelope;
    let psi3 = |t: T| {
        let p = env.psi(t);
        p * p * p
    };
    quad_oracle(
        &mut amp,
        &phase,
        &psi3,
        rho,
        theta,
        tau,
        [-radius, -radius],
        [radius, radius],
        tol,
    )
}

/// Polynomial-phase integral vs the same integral under the exact band
/// phase at linear placements, with the a-priori relative budget
///
///   |γ_{ν+1}| · Σ (β·range)^{ν+1} · τ/ρ
///
/// summed over the four phase slots. In the classical scaling ρ = β² at
/// ν = 2 the budget is O(β).
#[derive(Clone, Debug)]
pub struct WeakDispersionReport<T: Real> {
    pub truncated: OracleValue<T>,
    pub exact: OracleValue<T>,
    pub rel_difference: f64,
    pub rel_budget: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn weak_dispersion_expand<T: Real>(
    model: &DispersionModel<T>,
    exc: &DoubletExcitation<T>,
    rect: &RectifyMap<'_, T>,
    poly: &PolyAmplitude<T>,
    sign: Sign,
    q: T,
    tau: T,
    radius: T,
    tol: f64,
) -> Result<WeakDispersionReport<T>> {
    let beta = exc.beta;
    let rho = exc.rho;
    let theta = rho / (beta * beta);
    let truncated = rectified_integral(exc, rect, poly, sign, q, tau, radius, tol)?;

    let s = sign.scalar::<T>();
    let n0 = rect.jet.n0;
    let k_star = rect.jet.k_star;
    let om = |eta: T| model.omega(n0, s * k_star + eta);
    // exact phase under linear placements, scaled by β² like the polynomial
    let phase = move |qp: T, qpp: T| {
        let e = |x: T| om(s * beta * x);
        s * (e(q) - e(qp) - e(qpp) + e(qp + qpp - q)) / (beta * beta)
    };
    let mut amp = |qp: T, qpp: T| -> C<T> {
        let qppp = q - qp - qpp;
        let p = poly.eval([beta * qp, beta * qpp, beta * qppp]);
        p * exc.h_hat(sign, qp) * exc.h_hat(sign, qpp) * exc.h_hat(sign.flip(), qppp)
    };
    let env = &exc.envelope;
    let psi3 = |t: T| {
        let p = env.psi(t);
        p * p * p
    };
    let exact = quad_oracle(
        &mut amp,
        &phase,
        &psi3,
        rho,
        theta,
        tau,
        [-radius, -radius],
        [radius, radius],
        tol,
    )?;

    let nu = rect.nu;
    let gnext = if nu + 1 < 5 {
        rect.jet.gamma(nu + 1).as_f64()
    } else {
        rect.jet.fifth.map(|f| f.as_f64() / 120.0).unwrap_or(0.0)
    };
    let (b, r, qa) = (beta.as_f64(), radius.as_f64(), q.abs().as_f64());
    let pow = |x: f64| x.powi(nu as i32 + 1);
    let slots = pow(b * qa) + 2.0 * pow(b * r) + pow(b * (2.0 * r + qa));
    let rel_budget = gnext.abs() * slots * tau.as_f64() / rho.as_f64();

    let denom = truncated.value.norm().max(T::epsilon()).as_f64();
    let rel_difference = (exact.value - truncated.value).norm().as_f64() / denom;
    Ok(WeakDispersionReport { truncated, exact, rel_difference, rel_budget })
}
