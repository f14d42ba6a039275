//! Cubic interaction machinery: phase mismatches, selection rules, critical
//! points of the rectified phase, the interaction integral in oracle /
//! rectified / expanded forms, and the time-harmonic susceptibility series.
//!
//! Conventions. A quadruplet couples three origin modes into an end mode;
//! admissibility means momentum matching mod 2π. For a doublet excitation of
//! band n0 at carrier ±k★ the frequency-matched sign pattern is
//! (ς, ς, −ς) → ς, with the conjugate origin placed at −ςk★. In rectified
//! offsets q the momentum constraint is linear (q‴ = q − q′ − q″) and the
//! phase mismatch becomes the polynomial Φ^(ν); its β²-scaling Φ̊ has the
//! one-parameter family of critical points (q′, q″) = (q, q).

pub mod harmonic;
pub mod oracle;
pub mod rectified;
pub mod sphm;

use crate::dispersion::{DispersionModel, Mode, Sign};
use crate::rectify::RectifyMap;
use crate::scalar::{lit, Real};
use crate::util::wrap_pi;
use crate::{Error, Result};
use serde::Serialize;

/// One interaction: three origins feeding one end mode.
#[derive(Clone, Copy, Debug)]
pub struct Quadruplet<T: Real> {
    pub origins: [(Mode, T); 3],
    pub end: (Mode, T),
}

impl<T: Real> Quadruplet<T> {
    /// Momentum mismatch k − (k′ + k″ + k‴) wrapped to the zone; admissible
    /// quadruplets return ~0.
    pub fn momentum_residual(&self) -> T {
        let sum = self.origins.iter().fold(T::zero(), |a, &(_, k)| a + k);
        wrap_pi(self.end.1 - sum)
    }
}

/// Selection-rule verdict for a quadruplet near a doublet excitation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Fm,
    NonFmOpposite,
    NonFmThirdHarmonic,
    GvmViolating,
}

/// Classification with the margins that justify it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassifyReport<T: Real> {
    pub class: Classification,
    /// Frequency mismatch at the carrier placement.
    pub phi: T,
    /// Largest pairwise group-velocity gap among the origins.
    pub gvm_margin: T,
}

/// φ = ςω_n(k) − Σᵢ ς⁽ⁱ⁾ω_{n⁽ⁱ⁾}(k⁽ⁱ⁾).
pub fn phase_value<T: Real>(model: &DispersionModel<T>, quad: &Quadruplet<T>) -> T {
    let (em, ek) = quad.end;
    let mut phi = model.omega_mode(em, ek);
    for &(m, k) in &quad.origins {
        phi = phi - model.omega_mode(m, k);
    }
    phi
}

const GV_MATCH_TOL: f64 = 1e-8;

/// Apply the selection rules to a quadruplet whose origins sit near ±k★.
///
/// Group-velocity matching is checked first over origin pairs (each origin's
/// carrier is the nearer of ±k★); under inversion symmetry the intra-doublet
/// velocities agree automatically, so a nonzero margin flags a cross-doublet
/// combination. After that the sign pattern decides: Σς = 3ς is the
/// third-harmonic placement, Σς = −ς ends in the opposite mode. A matching
/// sign pattern with a band away from n0 is frequency-mismatched all the
/// same and is reported with the opposite-mode class, carrying its φ margin.
pub fn classify_quadruplet<T: Real>(
    model: &DispersionModel<T>,
    k_star: T,
    n0: usize,
    quad: &Quadruplet<T>,
) -> Result<ClassifyReport<T>> {
    let carrier = |k: T| -> T {
        if (wrap_pi(k - k_star)).abs() <= (wrap_pi(k + k_star)).abs() {
            k_star
        } else {
            -k_star
        }
    };
    let mut gv = [T::zero(); 3];
    for (i, &(m, k)) in quad.origins.iter().enumerate() {
        let c = carrier(k);
        let jet = model.jet_at(m.band, c)?;
        gv[i] = m.sign.scalar::<T>() * jet.derivs[1];
    }
    let mut gvm_margin = T::zero();
    for i in 0..3 {
        for j in (i + 1)..3 {
            gvm_margin = gvm_margin.max((gv[i] - gv[j]).abs());
        }
    }

    // φ at the carrier placement of the same sign/band pattern
    let carrier_quad = Quadruplet {
        origins: [
            (quad.origins[0].0, carrier(quad.origins[0].1)),
            (quad.origins[1].0, carrier(quad.origins[1].1)),
            (quad.origins[2].0, carrier(quad.origins[2].1)),
        ],
        end: (quad.end.0, {
            let sum = quad.origins.iter().fold(T::zero(), |a, &(_, k)| a + carrier(k));
            wrap_pi(sum)
        }),
    };
    let phi = phase_value(model, &carrier_quad);

    let s: i32 = quad.origins.iter().map(|&(m, _)| m.sign.signum()).sum();
    let end_sign = quad.end.0.sign.signum();
    let bands_ok =
        quad.end.0.band == n0 && quad.origins.iter().all(|&(m, _)| m.band == n0);

    let class = if gvm_margin.as_f64() > GV_MATCH_TOL {
        Classification::GvmViolating
    } else if s.abs() == 3 {
        Classification::NonFmThirdHarmonic
    } else if s != end_sign || !bands_ok {
        Classification::NonFmOpposite
    } else {
        Classification::Fm
    };
    Ok(ClassifyReport { class, phi, gvm_margin })
}

/// d^j/dx^j of the order-ν Taylor polynomial γ_(ν).
fn gamma_poly_deriv<T: Real>(rect: &RectifyMap<'_, T>, order: usize, x: T) -> T {
    let nu = rect.nu;
    let mut acc = T::zero();
    for j in (order..=nu).rev() {
        // coefficient of x^{j-order} is gamma_j * j!/(j-order)!
        let mut c = rect.jet.gamma(j);
        for f in (j - order + 1)..=j {
            c = c * lit::<T>(f as f64);
        }
        acc = acc * x + c;
    }
    acc
}

/// The rectified FM phase for one doublet: Φ^(ν) as a polynomial in the
/// offsets, and its β² scaling Φ̊.
pub struct RectifiedPhase<'a, 'b, T: Real> {
    pub rect: &'a RectifyMap<'b, T>,
    pub sign: Sign,
    pub beta: T,
}

impl<'a, 'b, T: Real> RectifiedPhase<'a, 'b, T> {
    pub fn new(rect: &'a RectifyMap<'b, T>, sign: Sign, beta: T) -> Self {
        Self { rect, sign, beta }
    }

    /// Φ^(ν)(q; q′, q″) = ς[γ(ςβq) − γ(ςβq′) − γ(ςβq″) + γ(ςβ(q′+q″−q))].
    pub fn phi_nu(&self, q: T, qp: T, qpp: T) -> T {
        let s = self.sign.scalar::<T>();
        let sb = s * self.beta;
        let g = |x: T| self.rect.gamma(x);
        s * (g(sb * q) - g(sb * qp) - g(sb * qpp) + g(sb * (qp + qpp - q)))
    }

    /// Φ̊ = Φ^(ν)/β².
    pub fn phi_ring(&self, q: T, qp: T, qpp: T) -> T {
        self.phi_nu(q, qp, qpp) / (self.beta * self.beta)
    }

    /// ∂Φ̊/∂(q′,q″), analytic.
    pub fn grad_ring(&self, q: T, qp: T, qpp: T) -> [T; 2] {
        let s = self.sign.scalar::<T>();
        let sb = s * self.beta;
        let u = qp + qpp - q;
        let g1 = |x: T| gamma_poly_deriv(self.rect, 1, x);
        let common = g1(sb * u);
        [(common - g1(sb * qp)) / self.beta, (common - g1(sb * qpp)) / self.beta]
    }

    /// Off-diagonal Hessian entry of Φ̊ at the critical point over end
    /// offset q: ςγ″(ςβq). The diagonal entries vanish there identically.
    pub fn hessian_offdiag_at_crit(&self, q: T) -> T {
        let s = self.sign.scalar::<T>();
        s * gamma_poly_deriv(self.rect, 2, s * self.beta * q)
    }
}

/// Critical-point report for the scaled phase at end offset q.
#[derive(Clone, Copy, Debug)]
pub struct CriticalReport<T: Real> {
    /// (q′, q″, q‴) = (q, q, −q).
    pub q_flat: [T; 3],
    /// Analytic gradient of Φ̊ at the critical point.
    pub grad: [T; 2],
    /// Hessian of Φ̊ in (q′, q″) at the critical point.
    pub hessian: [[T; 2]; 2],
    pub det: T,
    /// Φ̊ at the critical point (zero for the FM pattern).
    pub phase_at_crit: T,
}

/// Locate and certify the critical point q⃗♭ = (q, q, −q) of Φ̊(q; ·, ·).
pub fn critical_point<T: Real>(
    rect: &RectifyMap<'_, T>,
    sign: Sign,
    beta: T,
    q: T,
) -> Result<CriticalReport<T>> {
    if (beta * q).abs() > rect.domain_radius {
        return Err(Error::Precondition(
            "end offset beta*q outside the rectified window".into(),
        ));
    }
    let ph = RectifiedPhase::new(rect, sign, beta);
    let grad = ph.grad_ring(q, q, q);
    let scale = rect.jet.derivs[1].abs().max(T::one());
    if grad[0].abs().max(grad[1].abs()) > lit::<T>(1e-12) * scale {
        return Err(Error::Solver(format!(
            "phase gradient residual {:e} at the critical point; \
             jet and rectifier disagree",
            grad[0].abs().max(grad[1].abs()).as_f64()
        )));
    }
    let s = sign.scalar::<T>();
    let off = ph.hessian_offdiag_at_crit(q);
    // diagonal terms γ″(ςβu) − γ″(ςβq′) cancel exactly at the critical point
    let sb = s * beta;
    let diag = s * (gamma_poly_deriv(rect, 2, sb * q) - gamma_poly_deriv(rect, 2, sb * q));
    let hessian = [[diag, off], [off, diag]];
    let det = diag * diag - off * off;
    Ok(CriticalReport {
        q_flat: [q, q, -q],
        grad,
        hessian,
        det,
        phase_at_crit: ph.phi_ring(q, q, q),
    })
}
