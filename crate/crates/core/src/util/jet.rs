//! Truncated Taylor ("jet") arithmetic to order 5. Dispersion families are
//! evaluated as jets so that every derivative the theory consumes (band jets
//! to order 4, plus the order-(nu+1) coefficient entering the rectifier
//! normal form) is analytic rather than finite-differenced.

use crate::scalar::Real;

/// Number of Taylor coefficients carried: value and derivatives 1..=5.
pub const JET_LEN: usize = 6;

/// Taylor coefficients c_j = f^(j)(x0)/j! of a scalar function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T>(pub [T; JET_LEN]);

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); JET_LEN];
        c[0] = v;
        Jet(c)
    }

    /// The identity function evaluated at `x0`.
    pub fn var(x0: T) -> Self {
        let mut c = [T::zero(); JET_LEN];
        c[0] = x0;
        c[1] = T::one();
        Jet(c)
    }

    pub fn value(&self) -> T {
        self.0[0]
    }

    /// j-th derivative (j! times the Taylor coefficient), j <= 5.
    pub fn deriv(&self, j: usize) -> T {
        let mut fact = T::one();
        for m in 1..=j {
            fact *= T::lit(m as f64);
        }
        self.0[j] * fact
    }

    pub fn scale(mut self, s: T) -> Self {
        for c in &mut self.0 {
            *c *= s;
        }
        self
    }

    pub fn neg(self) -> Self {
        self.scale(-T::one())
    }

    pub fn add(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn add_const(mut self, v: T) -> Self {
        self.0[0] += v;
        self
    }

    pub fn mul(self, o: Self) -> Self {
        let mut c = [T::zero(); JET_LEN];
        for n in 0..JET_LEN {
            let mut acc = T::zero();
            for j in 0..=n {
                acc += self.0[j] * o.0[n - j];
            }
            c[n] = acc;
        }
        Jet(c)
    }

    pub fn div(self, o: Self) -> Self {
        let b0 = o.0[0];
        assert!(b0 != T::zero(), "jet division by zero constant term");
        let mut q = [T::zero(); JET_LEN];
        for n in 0..JET_LEN {
            let mut acc = self.0[n];
            for j in 1..=n {
                acc -= o.0[j] * q[n - j];
            }
            q[n] = acc / b0;
        }
        Jet(q)
    }

    pub fn sqrt(self) -> Self {
        let a = self.0;
        assert!(a[0] > T::zero(), "jet sqrt needs positive value");
        let s0 = a[0].sqrt();
        let mut s = [T::zero(); JET_LEN];
        s[0] = s0;
        for n in 1..JET_LEN {
            let mut acc = a[n];
            for j in 1..n {
                acc -= s[j] * s[n - j];
            }
            s[n] = acc / (T::lit(2.0) * s0);
        }
        Jet(s)
    }

    pub fn powi(self, p: usize) -> Self {
        let mut out = Jet::constant(T::one());
        for _ in 0..p {
            out = out.mul(self);
        }
        out
    }

    /// Nilpotent part (value dropped), used for analytic composition.
    fn tail(self) -> Self {
        let mut c = self.0;
        c[0] = T::zero();
        Jet(c)
    }

    /// cos/sin of the jet, computed jointly via the angle-addition formulas
    /// applied to the truncated series of the nilpotent part.
    pub fn cos_sin(self) -> (Self, Self) {
        let v = self.tail();
        let v2 = v.mul(v);
        let v3 = v2.mul(v);
        let v4 = v2.mul(v2);
        let v5 = v4.mul(v);
        // cos(v) = 1 - v^2/2 + v^4/24, sin(v) = v - v^3/6 + v^5/120 (order 5)
        let cos_v = Jet::constant(T::one())
            .sub(v2.scale(T::lit(0.5)))
            .add(v4.scale(T::lit(1.0 / 24.0)));
        let sin_v = v
            .sub(v3.scale(T::lit(1.0 / 6.0)))
            .add(v5.scale(T::lit(1.0 / 120.0)));
        let (c0, s0) = (self.0[0].cos(), self.0[0].sin());
        (
            cos_v.scale(c0).sub(sin_v.scale(s0)),
            sin_v.scale(c0).add(cos_v.scale(s0)),
        )
    }

    pub fn cos(self) -> Self {
        self.cos_sin().0
    }

    pub fn sin(self) -> Self {
        self.cos_sin().1
    }
}
