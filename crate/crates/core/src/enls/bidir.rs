//! Counter-propagating doublets coupled through phase-mismatched cubic terms.
//!
//! Each carrier direction keeps its own coefficient record — the backward one
//! extracted at the mirrored expansion point — and its own conjugation-paired
//! envelope doublet. The directions talk only through the cubic cross
//! monomial: the forward plus field is forced by −α_π δ× (Z_b₋)² Z_b₊, and
//! the three mirror images thereof. The resonant self-terms are phase-free in
//! the rotating frame while the cross terms keep an explicit e^{i(γ₀f+γ₀b)t}
//! factor; no single frame removes both carriers, which is also why the
//! comoving frame is rejected here.
//!
//! The report tracks the running fast-time integral of the forward cross
//! term. Because the integrand oscillates at the carrier sum rate, the
//! integral saturates instead of growing with the window; on the slow clock
//! (dτ = ρ·dt) the accumulated coupling is therefore O(ρ), which is what
//! licenses dropping the cross block from the reduced single-direction
//! models.

use num_complex::Complex as C;

use crate::enls::split_step::{
    apply_multiplier, half_multipliers, max_abs2, pair_rhs, IntegrateParams, NlWork, SpectralOps,
    NL_PHASE_MAX,
};
use crate::enls::{EnlsCoefficients, EnvelopeState, Frame};
use crate::scalar::{lit, Real, Scalar};
use crate::{Error, Result};

/// Run summary for one coupled integration.
#[derive(Clone, Copy, Debug)]
pub struct BidirReport<T: Real> {
    /// sup over grid and time of |∫₀^t α_π δ× e^{i(γ₀f+γ₀b)s} (z_b₋)² z_b₊ ds|
    /// on the fast clock (the phase factor is implicit in the fields when the
    /// run is in the lab frame). Multiply by the slow clock rate ρ to get the
    /// slow-time coupling integral.
    pub coupling_integral_sup: T,
    /// sup over grid and time of |z| across the forward doublet.
    pub sup_forward: T,
    /// Same for the backward doublet.
    pub sup_backward: T,
}

fn cross_rate<T: Real>(
    fwd: &EnlsCoefficients<T>,
    bwd: &EnlsCoefficients<T>,
    frame: Frame,
) -> T {
    match frame {
        // rotating each doublet by its own carrier leaves the cross monomial
        // oscillating at the sum of the two removed frequencies
        Frame::Rotating => fwd.gamma[0] + bwd.gamma[0],
        _ => T::zero(),
    }
}

/// The cross forcing evaluated pointwise: out = α_π δ e^{i·rate·t} (b₋)² b₊.
/// The sign convention (the equations subtract this) is handled by callers.
fn cross_term<T: Real>(
    alpha_pi: T,
    delta: C<T>,
    rate: T,
    t: T,
    b_plus: &[C<T>],
    b_minus: &[C<T>],
    out: &mut [C<T>],
) {
    let ph = C::from_polar(T::one(), rate * t) * delta * alpha_pi;
    for ((o, &bp), &bm) in out.iter_mut().zip(b_plus).zip(b_minus) {
        *o = ph * bm * bm * bp;
    }
}

/// RK4 for the coupled nonlinear flow over one Strang substep. Stage slots:
/// each doublet owns its work buffers; the cross forcing is added on top of
/// the per-doublet right-hand sides before the stage update.
#[allow(clippy::too_many_arguments)]
fn rk4_coupled<T: Scalar>(
    ops: &SpectralOps<T>,
    work_f: &mut NlWork<T>,
    work_b: &mut NlWork<T>,
    fwd: &EnlsCoefficients<T>,
    bwd: &EnlsCoefficients<T>,
    alpha_pi: T,
    quintic: bool,
    rate: T,
    t: T,
    zf: (&mut [C<T>], &mut [C<T>]),
    zb: (&mut [C<T>], &mut [C<T>]),
    dt: T,
) {
    let n = zf.0.len();
    let half = dt * lit::<T>(0.5);
    let sixth = dt / lit::<T>(6.0);
    let two = lit::<T>(2.0);
    let (zfp, zfm) = zf;
    let (zbp, zbm) = zb;
    let dxf = fwd.delta_cross[0];
    let dxb = bwd.delta_cross[0];

    let mut sfp = std::mem::take(&mut work_f.sp);
    let mut sfm = std::mem::take(&mut work_f.sm);
    let mut sbp = std::mem::take(&mut work_b.sp);
    let mut sbm = std::mem::take(&mut work_b.sm);

    let stage = |work_f: &mut NlWork<T>,
                     work_b: &mut NlWork<T>,
                     ts: T,
                     fp: &[C<T>],
                     fm: &[C<T>],
                     bp: &[C<T>],
                     bm: &[C<T>],
                     slot: (usize, usize)| {
        pair_rhs(ops, work_f, fwd, alpha_pi, quintic, fp, fm, slot);
        pair_rhs(ops, work_b, bwd, alpha_pi, quintic, bp, bm, slot);
        let ph = C::from_polar(T::one(), rate * ts) * alpha_pi;
        let cf = ph * dxf;
        let cb = ph * dxb;
        let (kfp, kfm) = (slot.0, slot.1);
        for j in 0..fp.len() {
            work_f.k[kfp][j] = work_f.k[kfp][j] - cf * bm[j] * bm[j] * bp[j];
            work_f.k[kfm][j] = work_f.k[kfm][j] - cf.conj() * bp[j] * bp[j] * bm[j];
            work_b.k[kfp][j] = work_b.k[kfp][j] - cb * fm[j] * fm[j] * fp[j];
            work_b.k[kfm][j] = work_b.k[kfm][j] - cb.conj() * fp[j] * fp[j] * fm[j];
        }
    };

    stage(work_f, work_b, t, zfp, zfm, zbp, zbm, (0, 1));
    for j in 0..n {
        sfp[j] = zfp[j] + work_f.k[0][j] * half;
        sfm[j] = zfm[j] + work_f.k[1][j] * half;
        sbp[j] = zbp[j] + work_b.k[0][j] * half;
        sbm[j] = zbm[j] + work_b.k[1][j] * half;
    }
    stage(work_f, work_b, t + half, &sfp, &sfm, &sbp, &sbm, (2, 3));
    for j in 0..n {
        sfp[j] = zfp[j] + work_f.k[2][j] * half;
        sfm[j] = zfm[j] + work_f.k[3][j] * half;
        sbp[j] = zbp[j] + work_b.k[2][j] * half;
        sbm[j] = zbm[j] + work_b.k[3][j] * half;
    }
    stage(work_f, work_b, t + half, &sfp, &sfm, &sbp, &sbm, (4, 5));
    for j in 0..n {
        sfp[j] = zfp[j] + work_f.k[4][j] * dt;
        sfm[j] = zfm[j] + work_f.k[5][j] * dt;
        sbp[j] = zbp[j] + work_b.k[4][j] * dt;
        sbm[j] = zbm[j] + work_b.k[5][j] * dt;
    }
    stage(work_f, work_b, t + dt, &sfp, &sfm, &sbp, &sbm, (6, 7));
    for j in 0..n {
        zfp[j] = zfp[j]
            + (work_f.k[0][j] + (work_f.k[2][j] + work_f.k[4][j]) * two + work_f.k[6][j]) * sixth;
        zfm[j] = zfm[j]
            + (work_f.k[1][j] + (work_f.k[3][j] + work_f.k[5][j]) * two + work_f.k[7][j]) * sixth;
        zbp[j] = zbp[j]
            + (work_b.k[0][j] + (work_b.k[2][j] + work_b.k[4][j]) * two + work_b.k[6][j]) * sixth;
        zbm[j] = zbm[j]
            + (work_b.k[1][j] + (work_b.k[3][j] + work_b.k[5][j]) * two + work_b.k[7][j]) * sixth;
    }

    work_f.sp = sfp;
    work_f.sm = sfm;
    work_b.sp = sbp;
    work_b.sm = sbm;
}

/// Integrate both doublets in place up to `t_end`, coupled through the cross
/// terms of their records. Both states must share the grid, the frame (lab or
/// rotating — there is no common comoving frame) and the current time.
pub fn integrate_bidirectional<T: Scalar>(
    fwd: &EnlsCoefficients<T>,
    bwd: &EnlsCoefficients<T>,
    forward: &mut EnvelopeState<T>,
    backward: &mut EnvelopeState<T>,
    params: &IntegrateParams<T>,
) -> Result<BidirReport<T>> {
    params.order.validate()?;
    for (label, coeffs) in [("forward", fwd), ("backward", bwd)] {
        if params.order.nu != coeffs.nu {
            return Err(Error::Config(format!(
                "order spec nu = {} does not match the {label} record (nu = {})",
                params.order.nu, coeffs.nu
            )));
        }
        if params.order.sigma != coeffs.p_plus.sigma {
            return Err(Error::Config(format!(
                "order spec sigma = {} does not match the {label} record (sigma = {})",
                params.order.sigma, coeffs.p_plus.sigma
            )));
        }
    }
    if forward.grid.n != backward.grid.n || forward.grid.l != backward.grid.l {
        return Err(Error::Config("the doublets must share one grid".into()));
    }
    if forward.frame != backward.frame {
        return Err(Error::Config("the doublets must share one frame".into()));
    }
    if forward.frame == Frame::Comoving {
        return Err(Error::Config(
            "counter-propagating doublets have no common comoving frame".into(),
        ));
    }
    if (forward.t - backward.t).abs() > lit::<T>(1e-12) * (T::one() + forward.t.abs()) {
        return Err(Error::Config("the doublets must start at the same time".into()));
    }
    if !(params.dt > T::zero()) {
        return Err(Error::Config("dt must be positive".into()));
    }
    let span = params.t_end - forward.t;
    if span < T::zero() {
        return Err(Error::Config("t_end precedes the state time".into()));
    }

    let n = forward.grid.n;
    let ops = SpectralOps::new(forward.grid);
    let mut work_f = NlWork::new(n);
    let mut work_b = NlWork::new(n);
    let apl = fwd.alpha_pi(params.alpha);
    let quintic = params.order.quintic;
    let rate = cross_rate(fwd, bwd, forward.frame);
    let dxf = fwd.delta_cross[0];
    let dx_norm = dxf.norm().max(bwd.delta_cross[0].norm());
    let cub = fwd
        .q_plus()
        .norm()
        .max(fwd.q_minus().norm())
        .max(bwd.q_plus().norm())
        .max(bwd.q_minus().norm());
    let qui = if quintic {
        fwd.delta5
            .norm()
            .max(fwd.delta5_minus.norm())
            .max(bwd.delta5.norm())
            .max(bwd.delta5_minus.norm())
    } else {
        T::zero()
    };

    let mut report = BidirReport {
        coupling_integral_sup: T::zero(),
        sup_forward: max_abs2(&forward.z_plus, &forward.z_minus).sqrt(),
        sup_backward: max_abs2(&backward.z_plus, &backward.z_minus).sqrt(),
    };
    if span == T::zero() {
        return Ok(report);
    }
    let steps = (span / params.dt).as_f64().ceil() as usize;
    let dt = span / lit::<T>(steps as f64);
    let t0 = forward.t;

    let (mfp, mfm) = half_multipliers(fwd, forward.frame, &ops, dt);
    let (mbp, mbm) = half_multipliers(bwd, forward.frame, &ops, dt);

    // trapezoid accumulation of the forward-plus cross forcing
    let zero = C::new(T::zero(), T::zero());
    let mut integral = vec![zero; n];
    let mut term_prev = vec![zero; n];
    let mut term_now = vec![zero; n];
    cross_term(
        apl,
        dxf,
        rate,
        t0,
        &backward.z_plus,
        &backward.z_minus,
        &mut term_prev,
    );

    for step in 0..steps {
        let m2 = max_abs2(&forward.z_plus, &forward.z_minus)
            .max(max_abs2(&backward.z_plus, &backward.z_minus));
        if !m2.is_finite() {
            return Err(Error::Solver(format!(
                "non-finite field at t = {}",
                forward.t.as_f64()
            )));
        }
        let phase = dt * (apl * (cub + dx_norm) * m2 + apl * apl * qui * m2 * m2);
        if phase.as_f64() > NL_PHASE_MAX {
            return Err(Error::Solver(format!(
                "nonlinear phase per step {:.3} rad exceeds {NL_PHASE_MAX}; reduce dt below {:.3e}",
                phase.as_f64(),
                (lit::<T>(NL_PHASE_MAX) / (phase / dt)).as_f64(),
            )));
        }

        apply_multiplier(&ops, &mfp, &mut forward.z_plus);
        apply_multiplier(&ops, &mfm, &mut forward.z_minus);
        apply_multiplier(&ops, &mbp, &mut backward.z_plus);
        apply_multiplier(&ops, &mbm, &mut backward.z_minus);
        let t = t0 + dt * lit::<T>(step as f64);
        rk4_coupled(
            &ops,
            &mut work_f,
            &mut work_b,
            fwd,
            bwd,
            apl,
            quintic,
            rate,
            t,
            (&mut forward.z_plus, &mut forward.z_minus),
            (&mut backward.z_plus, &mut backward.z_minus),
            dt,
        );
        apply_multiplier(&ops, &mfp, &mut forward.z_plus);
        apply_multiplier(&ops, &mfm, &mut forward.z_minus);
        apply_multiplier(&ops, &mbp, &mut backward.z_plus);
        apply_multiplier(&ops, &mbm, &mut backward.z_minus);
        let t_new = t0 + dt * lit::<T>((step + 1) as f64);
        forward.t = t_new;
        backward.t = t_new;

        cross_term(
            apl,
            dxf,
            rate,
            t_new,
            &backward.z_plus,
            &backward.z_minus,
            &mut term_now,
        );
        let half_dt = dt * lit::<T>(0.5);
        let mut sup = T::zero();
        for j in 0..n {
            integral[j] = integral[j] + (term_prev[j] + term_now[j]) * half_dt;
            sup = sup.max(integral[j].norm());
        }
        std::mem::swap(&mut term_prev, &mut term_now);
        report.coupling_integral_sup = report.coupling_integral_sup.max(sup);
        report.sup_forward = report
            .sup_forward
            .max(max_abs2(&forward.z_plus, &forward.z_minus).sqrt());
        report.sup_backward = report
            .sup_backward
            .max(max_abs2(&backward.z_plus, &backward.z_minus).sqrt());
    }
    if !(max_abs2(&forward.z_plus, &forward.z_minus)
        .max(max_abs2(&backward.z_plus, &backward.z_minus)))
    .is_finite()
    {
        return Err(Error::Solver("non-finite field at the end of the run".into()));
    }
    Ok(report)
}
