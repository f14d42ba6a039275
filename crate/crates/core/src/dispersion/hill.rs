//! Plane-wave-expansion band solver for a Hill-type cell operator
//! -(d/dr + ik)^2 + V(r) on the unit cell, V periodic, strictly positive.
//! Band frequencies are omega_n(k) = sqrt(lambda_n(k)); eigenmodes feed the
//! quartic overlap that stands in for the modal susceptibility.

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};
use crate::util::herm::{eigh, HermMatrix};
use crate::util::quad::integrate_c;
use crate::{tol, C, Error, Result};

use super::{DispersionModel, Mode, Provenance};

/// Piecewise-constant profile on the unit cell: value `pieces[i].1` on
/// [pieces[i].0, pieces[i+1].0), last piece extending to 1.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Profile {
    pub pieces: Vec<(f64, f64)>,
}

impl Profile {
    pub fn uniform(v: f64) -> Profile {
        Profile { pieces: vec![(0.0, v)] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pieces.is_empty() || self.pieces[0].0 != 0.0 {
            return Err(Error::Config("profile must start at r = 0".into()));
        }
        for w in self.pieces.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Config("profile breakpoints must increase".into()));
            }
        }
        if self.pieces.last().unwrap().0 >= 1.0 {
            return Err(Error::Config("profile breakpoints must lie in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn value(&self, r: f64) -> f64 {
        let r = r.rem_euclid(1.0);
        let mut v = self.pieces.last().unwrap().1;
        for w in self.pieces.windows(2) {
            if r >= w[0].0 && r < w[1].0 {
                v = w[0].1;
                break;
            }
        }
        v
    }

    pub fn min_value(&self) -> f64 {
        self.pieces.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    /// Fourier coefficient int_0^1 profile(r) e^{-2 pi i l r} dr, closed form.
    pub fn fourier<T: Real>(&self, l: i64) -> C<T> {
        let mut edges: Vec<(f64, f64)> = self.pieces.clone();
        edges.push((1.0, 0.0));
        if l == 0 {
            let mut acc = 0.0;
            for w in edges.windows(2) {
                acc += w[0].1 * (w[1].0 - w[0].0);
            }
            return C::new(lit(acc), T::zero());
        }
        let two_pi_l = 2.0 * std::f64::consts::PI * l as f64;
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for w in edges.windows(2) {
            let e1 = num_complex::Complex64::new(0.0, -two_pi_l * w[1].0).exp();
            let e0 = num_complex::Complex64::new(0.0, -two_pi_l * w[0].0).exp();
            acc += (e1 - e0) * w[0].1 / num_complex::Complex64::new(0.0, -two_pi_l);
        }
        C::new(lit(acc.re), lit(acc.im))
    }
}

/// Configuration for the band solver.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HillSpec {
    pub potential: Profile,
    /// cubic-response spatial weight entering the quartic overlap
    #[serde(default = "unit_profile")]
    pub chi3: Profile,
    /// cell inner-product weight (scalar surrogate of the permittivity
    /// weight); declared here rather than inferred
    #[serde(default = "unit_profile")]
    pub weight: Profile,
    pub n_bands: usize,
    #[serde(default = "default_nk")]
    pub n_k: usize,
    /// plane-wave half-width M (basis size 2M+1)
    #[serde(default = "default_basis")]
    pub basis: usize,
}

fn unit_profile() -> Profile {
    Profile::uniform(1.0)
}
fn default_nk() -> usize {
    64
}
fn default_basis() -> usize {
    32
}

pub struct HillBands<T: Real> {
    spec: HillSpec,
    /// sampled band table for export: ks[i], table[i][band]
    pub ks: Vec<T>,
    pub table: Vec<Vec<T>>,
}

/// Build a solver-backed dispersion model.
pub fn hill_bands<T: Real>(spec: &HillSpec) -> Result<DispersionModel<T>> {
    spec.potential.validate()?;
    spec.chi3.validate()?;
    spec.weight.validate()?;
    if spec.potential.min_value() <= 0.0 {
        return Err(Error::Config("potential must be strictly positive".into()));
    }
    if spec.weight.min_value() <= 0.0 {
        return Err(Error::Config("cell weight must be strictly positive".into()));
    }
    if spec.n_bands < 1 {
        return Err(Error::Config("need at least one band".into()));
    }
    if spec.n_k < 16 {
        return Err(Error::Config("band grid too coarse (n_k >= 16)".into()));
    }
    if spec.basis < spec.n_bands + 4 {
        return Err(Error::Config("plane-wave basis too small for requested bands".into()));
    }
    let mut h = HillBands { spec: spec.clone(), ks: Vec::new(), table: Vec::new() };
    // sample the zone inclusively for the exportable table
    let n = spec.n_k;
    for i in 0..=n {
        let k = lit::<T>(-1.0 + 2.0 * i as f64 / n as f64) * T::PI();
        let (oms, _) = h.solve_at(k);
        h.ks.push(k);
        h.table.push(oms.into_iter().take(spec.n_bands).collect());
    }
    Ok(DispersionModel::from_hill(h))
}

impl<T: Real> HillBands<T> {
    pub fn n_bands(&self) -> usize {
        self.spec.n_bands
    }

    fn assemble(&self, k: T) -> HermMatrix<T> {
        let m = self.spec.basis as i64;
        let nb = (2 * m + 1) as usize;
        let mut a = HermMatrix::zeros(nb);
        let two_pi = T::PI() + T::PI();
        for i in 0..nb {
            let mi = i as i64 - m;
            let kk = k + two_pi * lit::<T>(mi as f64);
            for j in 0..nb {
                let mj = j as i64 - m;
                let mut v = self.spec.potential.fourier::<T>(mi - mj);
                if i == j {
                    v = v + C::new(kk * kk, T::zero());
                }
                a.set(i, j, v);
            }
        }
        a
    }

    /// Eigen-solve at momentum k: returns (omega_n ascending, mode coefficient
    /// vectors). Modes are gauge-fixed (largest coefficient real positive at
    /// k >= 0, conjugate pairing at k < 0) and normalized in the weighted
    /// cell inner product.
    pub fn solve_at(&self, k: T) -> (Vec<T>, Vec<Vec<C<T>>>) {
        if k < T::zero() {
            let (oms, vecs) = self.solve_at(-k);
            let flipped = vecs
                .into_iter()
                .map(|v| {
                    let n = v.len();
                    (0..n).map(|j| v[n - 1 - j].conj()).collect()
                })
                .collect();
            return (oms, flipped);
        }
        let eig = eigh(&self.assemble(k));
        let nb = 2 * self.spec.basis + 1;
        let mut omegas = Vec::with_capacity(self.spec.n_bands);
        let mut modes = Vec::with_capacity(self.spec.n_bands);
        for b in 0..self.spec.n_bands.min(nb) {
            omegas.push(eig.values[b].max(T::zero()).sqrt());
            let mut v = eig.vectors[b].clone();
            // gauge: rotate the largest coefficient to the positive real axis
            let (mut best, mut best_norm) = (0usize, T::zero());
            for (i, c) in v.iter().enumerate() {
                if c.norm() > best_norm {
                    best_norm = c.norm();
                    best = i;
                }
            }
            let phase = v[best] / C::new(best_norm, T::zero());
            for c in v.iter_mut() {
                *c = *c * phase.conj();
            }
            // weighted normalization: sum conj(c_m) c_m' sigma_hat(m - m')
            let mut norm2 = C::new(T::zero(), T::zero());
            for (i, ci) in v.iter().enumerate() {
                for (j, cj) in v.iter().enumerate() {
                    let l = i as i64 - j as i64;
                    norm2 += ci.conj() * *cj * self.spec.weight.fourier::<T>(l);
                }
            }
            let scale = T::one() / norm2.re.max(T::lit(1e-300)).sqrt();
            for c in v.iter_mut() {
                *c = *c * scale;
            }
            modes.push(v);
        }
        (omegas, modes)
    }

    pub fn omega(&self, band: usize, k: T) -> T {
        self.solve_at(k).0[band]
    }

    /// Reject jets/overlaps at near-degenerate points.
    pub fn degeneracy_guard(&self, band: usize, k: T) -> Result<()> {
        let eig = eigh(&self.assemble(k.abs()));
        let lam: Vec<f64> = eig.values.iter().map(|l| l.as_f64()).collect();
        let gap_ok = |a: f64, b: f64| (a - b).abs() >= tol::BAND_DEGENERACY_GAP;
        if band > 0 && !gap_ok(lam[band], lam[band - 1]) {
            return Err(Error::Solver(format!(
                "bands {} and {} degenerate at k = {}",
                band - 1,
                band,
                k.as_f64()
            )));
        }
        if band + 1 < lam.len() && !gap_ok(lam[band], lam[band + 1]) {
            return Err(Error::Solver(format!(
                "bands {} and {} degenerate at k = {}",
                band,
                band + 1,
                k.as_f64()
            )));
        }
        Ok(())
    }

    /// Evaluate a mode at cell position r from its plane-wave coefficients.
    pub fn mode_value(&self, coeffs: &[C<T>], r: T) -> C<T> {
        let m = self.spec.basis as i64;
        let two_pi = T::PI() + T::PI();
        let mut acc = C::new(T::zero(), T::zero());
        for (i, c) in coeffs.iter().enumerate() {
            let mi = i as i64 - m;
            let ph = two_pi * lit::<T>(mi as f64) * r;
            acc += *c * C::new(ph.cos(), ph.sin());
        }
        acc
    }

    /// Quartic mode overlap standing in for the modal susceptibility:
    /// (2 pi)^{-2} int chi3(r) phi_1 phi_2 phi_3 conj(phi_end) w(r)
    /// e^{i (k1+k2+k3-k_end) r} dr. Mode functions do not depend on the
    /// doublet sign (the conjugate-pairing gauge makes the negative-sign
    /// mode function coincide with the positive one).
    pub fn q_overlap(&self, end: (Mode, T), origins: &[(Mode, T); 3]) -> C<T> {
        let (_, modes_e) = self.solve_at(end.1);
        let phi_e = modes_e[end.0.band].clone();
        let mut phis = Vec::new();
        for &(mo, k) in origins {
            let (_, ms) = self.solve_at(k);
            phis.push(ms[mo.band].clone());
        }
        let dk = origins.iter().map(|o| o.1).fold(T::zero(), |a, b| a + b) - end.1;
        // piecewise-smooth integrand: integrate between profile breakpoints
        let mut breaks: Vec<f64> = self.spec.chi3.pieces.iter().map(|p| p.0).collect();
        breaks.extend(self.spec.weight.pieces.iter().map(|p| p.0));
        breaks.push(1.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut acc = C::new(T::zero(), T::zero());
        for w in breaks.windows(2) {
            if w[1] - w[0] < 1e-14 {
                continue;
            }
            let mut f = |r: T| {
                let chi = lit::<T>(self.spec.chi3.value(r.as_f64()));
                let sg = lit::<T>(self.spec.weight.value(r.as_f64()));
                let mut v = C::new(chi * sg, T::zero());
                for p in &phis {
                    v = v * self.mode_value(p, r);
                }
                v = v * self.mode_value(&phi_e, r).conj();
                let ph = dk * r;
                v * C::new(ph.cos(), ph.sin())
            };
            let (v, _) = integrate_c(&mut f, lit(w[0]), lit(w[1]), 1e-12);
            acc += v;
        }
        let two_pi = T::PI() + T::PI();
        acc / C::new(two_pi * two_pi, T::zero())
    }
}

impl<T: Real> DispersionModel<T> {
    pub(super) fn from_hill(h: HillBands<T>) -> DispersionModel<T> {
        DispersionModel {
            n_bands: h.spec.n_bands,
            bands: super::Bands::Hill(h),
            q: super::QProvider::HillOverlap,
            provenance: Provenance::HillSolver,
        }
    }

    /// Access the sampled band table (hill models only).
    pub fn hill_table(&self) -> Option<(&[T], &[Vec<T>])> {
        match &self.bands {
            super::Bands::Hill(h) => Some((&h.ks, &h.table)),
            _ => None,
        }
    }
}
