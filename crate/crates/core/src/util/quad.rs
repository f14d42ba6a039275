//! Adaptive Gauss–Legendre quadrature. Nodes and weights are computed at
//! runtime (Newton on the Legendre recurrence from Chebyshev initial
//! guesses), so no tabulated constants enter the build. The adaptive driver
//! bisects panels until the two-half refinement agrees with the whole panel.

use once_cell::sync::Lazy;

use crate::scalar::Real;
use crate::C;

/// Nodes/weights on [-1, 1], stored in f64 and lifted on use.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess for the i-th positive-side root
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

static G15: Lazy<GaussLegendre> = Lazy::new(|| GaussLegendre::new(15));

/// Fixed 15-point panel rule for a complex integrand.
pub fn gauss15_c<T: Real>(f: &mut impl FnMut(T) -> C<T>, a: T, b: T) -> C<T> {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut acc = C::new(T::zero(), T::zero());
    for (x, w) in G15.nodes.iter().zip(&G15.weights) {
        acc += f(mid + half * T::lit(*x)) * T::lit(*w);
    }
    acc * half
}

/// Adaptive integral of a complex integrand with an error estimate.
/// `tol` is treated as absolute; panels are accepted when whole-vs-halves
/// agreement beats the per-panel share of it.
pub fn integrate_c<T: Real>(
    f: &mut impl FnMut(T) -> C<T>,
    a: T,
    b: T,
    tol: f64,
) -> (C<T>, f64) {
    let whole = gauss15_c(f, a, b);
    let mut value = C::new(T::zero(), T::zero());
    let mut err = 0.0f64;
    adapt(f, a, b, whole, tol, 0, &mut value, &mut err);
    (value, err)
}

fn adapt<T: Real>(
    f: &mut impl FnMut(T) -> C<T>,
    a: T,
    b: T,
    whole: C<T>,
    tol: f64,
    depth: usize,
    value: &mut C<T>,
    err: &mut f64,
) {
    let mid = (a + b) * T::lit(0.5);
    let left = gauss15_c(f, a, mid);
    let right = gauss15_c(f, mid, b);
    let refined = left + right;
    let delta = (refined - whole).norm().as_f64();
    if delta <= tol || depth >= 28 {
        *value += refined;
        *err += delta;
        return;
    }
    adapt(f, a, mid, left, tol * 0.5, depth + 1, value, err);
    adapt(f, mid, b, right, tol * 0.5, depth + 1, value, err);
}

/// Adaptive integral of a real integrand.
pub fn integrate_r<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T, tol: f64) -> (T, f64) {
    let (v, e) = integrate_c(&mut |x| C::new(f(x), T::zero()), a, b, tol);
    (v.re, e)
}

/// Integrate an oscillatory integrand by pre-splitting [a, b] so that the
/// supplied phase bound advances at most ~pi/4 per panel before adapting.
/// `dphase_max` bounds |d(phase)/dx| on the interval.
pub fn integrate_osc_c<T: Real>(
    f: &mut impl FnMut(T) -> C<T>,
    a: T,
    b: T,
    dphase_max: f64,
    tol: f64,
) -> (C<T>, f64) {
    let len = (b - a).as_f64();
    let panels = ((len * dphase_max) / (std::f64::consts::FRAC_PI_4)).ceil().max(1.0) as usize;
    let panels = panels.min(200_000);
    let mut value = C::new(T::zero(), T::zero());
    let mut err = 0.0;
    let ptol = tol / panels as f64;
    for i in 0..panels {
        let x0 = a + (b - a) * T::lit(i as f64 / panels as f64);
        let x1 = a + (b - a) * T::lit((i + 1) as f64 / panels as f64);
        let (v, e) = integrate_c(f, x0, x1, ptol);
        value += v;
        err += e;
    }
    (value, err)
}
