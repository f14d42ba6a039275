//! Band structures for the 1D periodic medium: synthetic inversion-symmetric
//! families with analytic jets, a plane-wave Hill-operator band solver, modal
//! susceptibility providers, and genericity diagnostics for a carrier
//! (n0, k_star).

pub mod hill;


use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};
use crate::util::jet::Jet;
use crate::{tol, C, Error, Result};

/// Doublet sign: bands come in +/- frequency pairs; a combined mode index is
/// (sign, band) with dispersion sign * omega_band(k).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn scalar<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    #[inline]
    pub fn signum(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Combined mode index (sign, band). Band indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub sign: Sign,
    pub band: usize,
}

impl Mode {
    pub fn plus(band: usize) -> Mode {
        Mode { sign: Sign::Plus, band }
    }
    pub fn minus(band: usize) -> Mode {
        Mode { sign: Sign::Minus, band }
    }
    pub fn flip(self) -> Mode {
        Mode { sign: self.sign.flip(), band: self.band }
    }
}

/// Synthetic band families. All are even in k by construction; the
/// trigonometric ones are 2 pi periodic, the others are used on the zone
/// without folding (rectification and envelope work never leaves it).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// omega(k) = a - b cos k
    #[serde(rename = "2-cos")]
    TwoMinusCos {
        #[serde(default = "two")]
        a: f64,
        #[serde(default = "one")]
        b: f64,
    },
    /// omega(k) = sqrt(m2 + scale k^2)
    Sqrt {
        #[serde(default = "one")]
        m2: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// omega(k) = sum_j coeffs[j] (cos k)^j
    CosPoly { coeffs: Vec<f64> },
    /// omega(k) = sum_j coeffs[j] k^(2j)
    EvenPoly { coeffs: Vec<f64> },
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

impl FamilySpec {
    /// Evaluate the band as an order-5 jet at `k`.
    fn jet<T: Real>(&self, k: T) -> Jet<T> {
        let x = Jet::var(k);
        match self {
            FamilySpec::TwoMinusCos { a, b } => x.cos().scale(-lit::<T>(*b)).add_const(lit(*a)),
            FamilySpec::Sqrt { m2, scale } => {
                x.mul(x).scale(lit(*scale)).add_const(lit(*m2)).sqrt()
            }
            FamilySpec::CosPoly { coeffs } => {
                let c = x.cos();
                let mut acc = Jet::constant(T::zero());
                // Horner in the cos k jet
                for &a in coeffs.iter().rev() {
                    acc = acc.mul(c).add_const(lit(a));
                }
                acc
            }
            FamilySpec::EvenPoly { coeffs } => {
                let k2 = x.mul(x);
                let mut acc = Jet::constant(T::zero());
                for &a in coeffs.iter().rev() {
                    acc = acc.mul(k2).add_const(lit(a));
                }
                acc
            }
        }
    }

    fn value<T: Real>(&self, k: T) -> T {
        match self {
            FamilySpec::TwoMinusCos { a, b } => lit::<T>(*a) - lit::<T>(*b) * k.cos(),
            FamilySpec::Sqrt { m2, scale } => (lit::<T>(*m2) + lit::<T>(*scale) * k * k).sqrt(),
            FamilySpec::CosPoly { coeffs } => {
                let c = k.cos();
                let mut acc = T::zero();
                for &a in coeffs.iter().rev() {
                    acc = acc * c + lit(a);
                }
                acc
            }
            FamilySpec::EvenPoly { coeffs } => {
                let k2 = k * k;
                let mut acc = T::zero();
                for &a in coeffs.iter().rev() {
                    acc = acc * k2 + lit(a);
                }
                acc
            }
        }
    }

    fn periodic(&self) -> bool {
        matches!(self, FamilySpec::TwoMinusCos { .. } | FamilySpec::CosPoly { .. })
    }
}

/// Causal single-pole response kernel: each origin field enters the cubic
/// response through 1/(rate - i omega); amplitude scales the whole kernel.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KernelSpec {
    pub rate: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

/// Synthetic modal susceptibility: a smooth even cosine form factor times
/// optional per-slot causal kernel factors:
///
///   Qk(k, k') = [q0 + cos_origin (cos k1'+cos k2'+cos k3') + cos_end cos k]
///               x prefactor(end) x amplitude x prod_j chi(mode_j', k_j')
///
/// with chi(m, k) = 1/(rate - i omega_m(k)) when a kernel is declared and 1
/// otherwise. `omega_end_prefactor` multiplies by (-i omega_mode(k_end)),
/// the minimal factor that makes the coupling imaginary at the carrier while
/// keeping the reality symmetry Qk_{-modes}(-k) = conj Qk_{modes}(k).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SyntheticQSpec {
    #[serde(default = "one")]
    pub q0: f64,
    #[serde(default)]
    pub cos_origin: f64,
    #[serde(default)]
    pub cos_end: f64,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub omega_end_prefactor: bool,
    /// Fifth-order overlap constant (the quintic coupling uses 10x this value
    /// at the carrier). None models a cubic-only medium.
    #[serde(default)]
    pub quintic: Option<f64>,
}

impl Default for SyntheticQSpec {
    fn default() -> Self {
        SyntheticQSpec {
            q0: 1.0,
            cos_origin: 0.0,
            cos_end: 0.0,
            kernel: None,
            omega_end_prefactor: false,
            quintic: None,
        }
    }
}

/// Full synthetic model: ordered bands plus the susceptibility.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelSpec {
    pub bands: Vec<FamilySpec>,
    #[serde(default)]
    pub susceptibility: SyntheticQSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Synthetic,
    HillSolver,
}

enum Bands<T: Real> {
    Synthetic(Vec<FamilySpec>),
    Hill(hill::HillBands<T>),
}

enum QProvider {
    Synthetic(SyntheticQSpec),
    HillOverlap,
}

/// Band structure + modal susceptibility for one medium.
pub struct DispersionModel<T: Real> {
    bands: Bands<T>,
    q: QProvider,
    n_bands: usize,
    provenance: Provenance,
}

/// Derivatives of one band at a carrier point, with error estimates.
/// `derivs[j]` is the j-th derivative; estimates are absolute.
#[derive(Clone, Debug)]
pub struct TaylorJet<T> {
    pub k_star: T,
    pub n0: usize,
    pub derivs: [T; 5],
    pub err: [T; 5],
    /// Fifth derivative when the band is analytic; normal-form diagnostics
    /// use it, nothing downstream requires it.
    pub fifth: Option<T>,
}

impl<T: Real> TaylorJet<T> {
    /// Taylor coefficient gamma_j = omega^(j)(k_star)/j!.
    pub fn gamma(&self, j: usize) -> T {
        let mut f = T::one();
        for m in 1..=j {
            f *= lit::<T>(m as f64);
        }
        self.derivs[j] / f
    }

    pub fn is_generic(&self) -> bool {
        self.derivs[1] != T::zero()
    }

    /// Jet of the mirror carrier in the same band: odd derivatives flip.
    pub fn mirrored(&self) -> TaylorJet<T> {
        let mut derivs = self.derivs;
        for (j, d) in derivs.iter_mut().enumerate() {
            if j % 2 == 1 {
                *d = -*d;
            }
        }
        TaylorJet {
            k_star: -self.k_star,
            n0: self.n0,
            derivs,
            err: self.err,
            fifth: self.fifth.map(|f| -f),
        }
    }
}

/// Genericity report for a carrier choice; margins are absolute values of
/// the quantities the theory needs bounded away from zero.
#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub modpi_margin: f64,
    pub modpi_ok: bool,
    /// per band: |3 omega_{n0}(k_star) - omega_n(3 k_star)|
    pub third_harmonic_margins: Vec<f64>,
    pub third_harmonic_ok: bool,
    /// per band: |omega_n'(3 k_star) - omega_{n0}'(k_star)|
    pub group_velocity_margins: Vec<f64>,
    pub group_velocity_ok: bool,
    pub omega_value: f64,
    pub omega_value_ok: bool,
    pub omega_d1: f64,
    pub omega_d1_ok: bool,
    pub omega_d2: f64,
    pub omega_d2_ok: bool,
    pub all_generic: bool,
}

/// Validation grid size for evenness / ordering checks at construction.
const VALIDATION_GRID: usize = 257;

pub fn make_synthetic<T: Real>(spec: &ModelSpec) -> Result<DispersionModel<T>> {
    if spec.bands.is_empty() {
        return Err(Error::Config("model needs at least one band".into()));
    }
    let model = DispersionModel {
        n_bands: spec.bands.len(),
        bands: Bands::Synthetic(spec.bands.clone()),
        q: QProvider::Synthetic(spec.susceptibility.clone()),
        provenance: Provenance::Synthetic,
    };
    model.validate()?;
    Ok(model)
}

impl<T: Real> DispersionModel<T> {
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    /// Band frequency omega_n(k), n zero-based.
    pub fn omega(&self, band: usize, k: T) -> T {
        assert!(band < self.n_bands, "band index out of range");
        match &self.bands {
            Bands::Synthetic(fams) => fams[band].value(k),
            Bands::Hill(h) => h.omega(band, k),
        }
    }

    /// Signed mode frequency: omega_(sign,n)(k) = sign * omega_n(k).
    pub fn omega_mode(&self, mode: Mode, k: T) -> T {
        mode.sign.scalar::<T>() * self.omega(mode.band, k)
    }

    /// Whether band functions are 2 pi periodic (zone arithmetic wraps).
    pub fn periodic(&self) -> bool {
        match &self.bands {
            Bands::Synthetic(fams) => fams.iter().all(|f| f.periodic()),
            Bands::Hill(_) => true,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = VALIDATION_GRID;
        for i in 0..n {
            let k = lit::<T>(-1.0 + 2.0 * i as f64 / (n - 1) as f64) * T::PI();
            let mut prev = T::zero();
            for b in 0..self.n_bands {
                let w = self.omega(b, k);
                let wm = self.omega(b, -k);
                if (w - wm).abs().as_f64() > 1e-12 {
                    return Err(Error::Config(format!(
                        "band {b} violates evenness at k={}",
                        k.as_f64()
                    )));
                }
                if w < prev {
                    return Err(Error::Config(format!(
                        "band ordering violated at k={}: omega_{b} < omega_{}",
                        k.as_f64(),
                        b.max(1) - 1
                    )));
                }
                prev = w;
            }
        }
        Ok(())
    }

    /// Wrap k into the zone when the model is periodic; pass through otherwise.
    pub fn zone(&self, k: T) -> T {
        if self.periodic() {
            crate::util::wrap_pi(k)
        } else {
            k
        }
    }

    /// Derivative jet of band `n0` at `k_star`: analytic for synthetic
    /// families, Richardson-extrapolated central differences for solver bands.
    pub fn jet_at(&self, n0: usize, k_star: T) -> Result<TaylorJet<T>> {
        assert!(n0 < self.n_bands);
        match &self.bands {
            Bands::Synthetic(fams) => {
                let j = fams[n0].jet(k_star);
                let mut derivs = [T::zero(); 5];
                for (i, d) in derivs.iter_mut().enumerate() {
                    *d = j.deriv(i);
                }
                Ok(TaylorJet {
                    k_star,
                    n0,
                    derivs,
                    err: [T::lit(1e-15); 5],
                    fifth: Some(j.deriv(5)),
                })
            }
            Bands::Hill(h) => {
                h.degeneracy_guard(n0, k_star)?;
                let f = |k: T| h.omega(n0, k);
                let (derivs, err) = fd_jet(&f, k_star);
                let mut out = TaylorJet { k_star, n0, derivs, err, fifth: None };
                out.derivs[0] = f(k_star);
                out.err[0] = T::lit(1e-12);
                Ok(out)
            }
        }
    }

    /// Genericity diagnostics for the carrier (n0, k_star).
    pub fn check_generic(&self, n0: usize, k_star: T) -> Result<GenericityReport> {
        let jet = self.jet_at(n0, k_star)?;
        let margin = tol::GENERICITY_MARGIN;
        let two_k = crate::util::wrap_pi(k_star + k_star).abs().as_f64();
        let k3 = self.zone(k_star * lit(3.0));
        let w3 = lit::<T>(3.0) * self.omega(n0, k_star);
        let mut third = Vec::new();
        let mut gv = Vec::new();
        for b in 0..self.n_bands {
            third.push((self.omega(b, k3) - w3).abs().as_f64());
            let jb = self.jet_at(b, k3)?;
            gv.push((jb.derivs[1] - jet.derivs[1]).abs().as_f64());
        }
        let modpi_ok = two_k > margin;
        let third_ok = third.iter().all(|&m| m > margin);
        let gv_ok = gv.iter().all(|&m| m > margin);
        let w0 = jet.derivs[0].abs().as_f64();
        let w1 = jet.derivs[1].abs().as_f64();
        let w2 = jet.derivs[2].abs().as_f64();
        let report = GenericityReport {
            modpi_margin: two_k,
            modpi_ok,
            third_harmonic_margins: third,
            third_harmonic_ok: third_ok,
            group_velocity_margins: gv,
            group_velocity_ok: gv_ok,
            omega_value: w0,
            omega_value_ok: w0 > margin,
            omega_d1: w1,
            omega_d1_ok: w1 > margin,
            omega_d2: w2,
            omega_d2_ok: w2 > margin,
            all_generic: modpi_ok && third_ok && gv_ok && w0 > margin && w1 > margin && w2 > margin,
        };
        Ok(report)
    }

    /// Modal susceptibility Qk for the end mode/momentum against the three
    /// ordered origin slots.
    pub fn q_value(&self, end: (Mode, T), origins: &[(Mode, T); 3]) -> C<T> {
        self.q_value_l(end, origins, [0, 0, 0])
    }

    /// Susceptibility weighted by per-origin-slot frequency-derivative order
    /// l (the Taylor coefficients of the slow-time expansion of the causal
    /// kernel). Instantaneous media vanish for |l| >= 1.
    pub fn q_value_l(&self, end: (Mode, T), origins: &[(Mode, T); 3], l: [usize; 3]) -> C<T> {
        match &self.q {
            QProvider::Synthetic(s) => {
                let total_l: usize = l.iter().sum();
                if s.kernel.is_none() && total_l > 0 {
                    return C::new(T::zero(), T::zero());
                }
                let mut form = lit::<T>(s.q0);
                for &(_, k) in origins {
                    form += lit::<T>(s.cos_origin) * k.cos();
                }
                form += lit::<T>(s.cos_end) * end.1.cos();
                let mut out = C::new(form, T::zero());
                if let Some(kern) = &s.kernel {
                    let c = lit::<T>(kern.rate);
                    out = out * lit::<T>(kern.amplitude);
                    for (j, &(m, k)) in origins.iter().enumerate() {
                        let om = self.omega_mode(m, k);
                        let pole = C::new(c, -om);
                        // (-1)^l / (rate - i omega)^(l+1)
                        let mut factor = C::new(T::one(), T::zero());
                        for _ in 0..=l[j] {
                            factor = factor / pole;
                        }
                        if l[j] % 2 == 1 {
                            factor = -factor;
                        }
                        out = out * factor;
                    }
                }
                if s.omega_end_prefactor {
                    let om = self.omega_mode(end.0, end.1);
                    out = out * C::new(T::zero(), -om);
                }
                out
            }
            QProvider::HillOverlap => {
                if l.iter().any(|&x| x > 0) {
                    return C::new(T::zero(), T::zero());
                }
                match &self.bands {
                    Bands::Hill(h) => h.q_overlap(end, origins),
                    _ => unreachable!("hill overlap provider without hill bands"),
                }
            }
        }
    }

    /// Fifth-order overlap at the given sextuple (end mode + five origins).
    /// Zero for cubic-only media.
    pub fn q_quintic(&self, _end: (Mode, T), origins: &[(Mode, T); 5]) -> C<T> {
        match &self.q {
            QProvider::Synthetic(s) => match s.quintic {
                None => C::new(T::zero(), T::zero()),
                Some(q5) => {
                    let mut out = C::new(lit::<T>(q5), T::zero());
                    if let Some(kern) = &s.kernel {
                        let c = lit::<T>(kern.rate);
                        out = out * lit::<T>(kern.amplitude);
                        for &(m, k) in origins {
                            let om = self.omega_mode(m, k);
                            out = out / C::new(c, -om);
                        }
                    }
                    out
                }
            },
            _ => C::new(T::zero(), T::zero()),
        }
    }

    /// Slot-separable kernel decomposition for the modal reference
    /// integrator. None when the provider does not factor per slot.
    pub fn q_separable(&self) -> Option<SeparableQ<T>> {
        match &self.q {
            QProvider::Synthetic(s) => Some(SeparableQ::build(s)),
            _ => None,
        }
    }

    pub fn has_kernel(&self) -> bool {
        matches!(&self.q, QProvider::Synthetic(s) if s.kernel.is_some())
    }

    pub fn synthetic_q(&self) -> Option<&SyntheticQSpec> {
        match &self.q {
            QProvider::Synthetic(s) => Some(s),
            _ => None,
        }
    }
}

/// One multiplicative factor on a convolution slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlotFactor {
    pub cos: bool,
    /// power of the per-slot causal pole 1/(rate - i omega_mode(k))
    pub chi_pow: u8,
    /// time-derivative order applied to the slot field (0 or 1 here)
    pub dt: u8,
}

impl SlotFactor {
    pub const PLAIN: SlotFactor = SlotFactor { cos: false, chi_pow: 0, dt: 0 };
}

/// End-slot multiplier (applied pointwise after the convolution).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EndFactor {
    pub cos: bool,
    pub omega_prefactor: bool,
}

/// One separable term: coeff x end(k) x prod_j slot_j(k_j).
#[derive(Clone, Debug)]
pub struct SepTerm<T> {
    pub coeff: T,
    pub end: EndFactor,
    pub slots: [SlotFactor; 3],
    /// total time-derivative order of the term (sum of slot dt's)
    pub order: u8,
}

/// Slot-separable kernel: Qk_{l}(k, k') expanded into factorized terms for
/// both l = 0 and |l| = 1 (the latter only when a causal kernel is present).
#[derive(Clone, Debug)]
pub struct SeparableQ<T> {
    pub terms: Vec<SepTerm<T>>,
    pub kernel: Option<KernelSpec>,
}

impl<T: Real> SeparableQ<T> {
    fn build(s: &SyntheticQSpec) -> SeparableQ<T> {
        let chi = if s.kernel.is_some() { 1 } else { 0 };
        let amp = s.kernel.as_ref().map_or(1.0, |k| k.amplitude);
        let end_plain = EndFactor { cos: false, omega_prefactor: s.omega_end_prefactor };
        let end_cos = EndFactor { cos: true, omega_prefactor: s.omega_end_prefactor };
        let plain = SlotFactor { cos: false, chi_pow: chi, dt: 0 };
        let cos = SlotFactor { cos: true, chi_pow: chi, dt: 0 };
        let mut terms = Vec::new();
        let mut push = |coeff: f64, end: EndFactor, slots: [SlotFactor; 3], order: u8| {
            if coeff != 0.0 {
                terms.push(SepTerm { coeff: lit::<T>(coeff), end, slots, order });
            }
        };
        // l = 0 terms
        push(s.q0 * amp, end_plain, [plain; 3], 0);
        for j in 0..3 {
            let mut sl = [plain; 3];
            sl[j] = cos;
            push(s.cos_origin * amp, end_plain, sl, 0);
        }
        push(s.cos_end * amp, end_cos, [plain; 3], 0);
        // |l| = 1 terms: slot j gains a pole power and a time derivative,
        // with the (-1)^1 sign of the kernel Taylor coefficient.
        if s.kernel.is_some() {
            let dslot = SlotFactor { cos: false, chi_pow: 2, dt: 1 };
            let dslot_cos = SlotFactor { cos: true, chi_pow: 2, dt: 1 };
            for j in 0..3 {
                let mut sl = [plain; 3];
                sl[j] = dslot;
                push(-s.q0 * amp, end_plain, sl, 1);
                sl[j] = dslot_cos;
                push(-s.cos_origin * amp, end_plain, sl, 1);
                // cos on a different slot than the derivative
                for a in 0..3 {
                    if a == j {
                        continue;
                    }
                    let mut sl2 = [plain; 3];
                    sl2[j] = dslot;
                    sl2[a] = cos;
                    push(-s.cos_origin * amp, end_plain, sl2, 1);
                }
                let mut sl3 = [plain; 3];
                sl3[j] = dslot;
                push(-s.cos_end * amp, end_cos, sl3, 1);
            }
        }
        SeparableQ { terms, kernel: s.kernel.clone() }
    }

    /// Evaluate a slot factor for a mode/momentum pair (time derivative
    /// excluded: the integrator applies that to the field).
    pub fn slot_value(
        &self,
        f: SlotFactor,
        omega_mode: T,
        k: T,
    ) -> C<T> {
        let mut v = C::new(if f.cos { k.cos() } else { T::one() }, T::zero());
        if f.chi_pow > 0 {
            let rate = lit::<T>(self.kernel.as_ref().expect("chi factor without kernel").rate);
            let pole = C::new(rate, -omega_mode);
            for _ in 0..f.chi_pow {
                v = v / pole;
            }
        }
        v
    }

    pub fn end_value(&self, f: EndFactor, omega_mode: T, k: T) -> C<T> {
        let mut v = C::new(if f.cos { k.cos() } else { T::one() }, T::zero());
        if f.omega_prefactor {
            v = v * C::new(T::zero(), -omega_mode);
        }
        v
    }
}

/// Central-difference jet with two Richardson levels. `f` must be smooth on
/// [k - 2h, k + 2h] for the largest h used.
fn fd_jet<T: Real>(f: &impl Fn(T) -> T, k: T) -> ([T; 5], [T; 5]) {
    let h0 = lit::<T>(1e-3) * (T::PI() + T::PI());
    let eval = |h: T, order: usize| -> T {
        let fm2 = f(k - h - h);
        let fm1 = f(k - h);
        let f0 = f(k);
        let fp1 = f(k + h);
        let fp2 = f(k + h + h);
        match order {
            1 => (fm2 - fp2 + (fp1 - fm1) * lit(8.0)) / (lit::<T>(12.0) * h),
            2 => {
                (-fp2 - fm2 + (fp1 + fm1) * lit(16.0) - f0 * lit(30.0))
                    / (lit::<T>(12.0) * h * h)
            }
            3 => (fp2 - fm2 + (fm1 - fp1) * lit(2.0)) / (lit::<T>(2.0) * h * h * h),
            4 => (fp2 + fm2 - (fp1 + fm1) * lit(4.0) + f0 * lit(6.0)) / (h * h * h * h),
            _ => unreachable!(),
        }
    };
    let mut derivs = [T::zero(); 5];
    let mut err = [T::zero(); 5];
    derivs[0] = f(k);
    err[0] = T::lit(1e-14);
    for order in 1..=4usize {
        // convergence order of the base stencil
        let p = if order <= 2 { 4 } else { 2 };
        let fac = lit::<T>((1u64 << p) as f64);
        let a0 = eval(h0, order);
        let a1 = eval(h0 * lit(0.5), order);
        let a2 = eval(h0 * lit(0.25), order);
        let r1 = (a1 * fac - a0) / (fac - T::one());
        let r2 = (a2 * fac - a1) / (fac - T::one());
        // second Richardson level (order p+2 after the first)
        let fac2 = lit::<T>((1u64 << (p + 2)) as f64);
        let rr = (r2 * fac2 - r1) / (fac2 - T::one());
        derivs[order] = rr;
        err[order] = (rr - r2).abs() + (r2 - r1).abs() * lit(0.1);
    }
    (derivs, err)
}
