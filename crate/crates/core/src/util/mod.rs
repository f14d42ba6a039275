//! Numeric utilities shared across the library: truncated Taylor (jet)
//! arithmetic, adaptive Gauss–Legendre quadrature with runtime-computed
//! nodes, log-log slope fits, a small complex Hermitian eigensolver, and
//! interpolation helpers.

pub mod fit;
pub mod herm;
pub mod jet;
pub mod quad;

use crate::scalar::Real;

/// Catmull–Rom weights for 4-point cubic interpolation at fraction `u` in
/// [0,1] between the middle two samples.
#[inline]
pub fn catmull_rom<T: Real>(u: T) -> [T; 4] {
    let half = T::lit(0.5);
    let u2 = u * u;
    let u3 = u2 * u;
    [
        -half * u3 + u2 - half * u,
        T::lit(1.5) * u3 - T::lit(2.5) * u2 + T::one(),
        -T::lit(1.5) * u3 + T::lit(2.0) * u2 + half * u,
        half * u3 - half * u2,
    ]
}

/// Wrap an angle-like quantity into [-pi, pi).
#[inline]
pub fn wrap_pi<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = (x + T::PI()) % two_pi;
    if y < T::zero() {
        y += two_pi;
    }
    y - T::PI()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catmull_rom_interpolates_cubics_exactly_at_nodes() {
        // weights at u=0 pick the left middle sample, at u=1 the right one
        let w0 = catmull_rom(0.0f64);
        assert_eq!(w0, [0.0, 1.0, 0.0, 0.0]);
        let w1 = catmull_rom(1.0f64);
        for (a, b) in w1.iter().zip([0.0, 0.0, 1.0, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        // linear data reproduced exactly in the interior
        let data = [1.0, 3.0, 5.0, 7.0];
        let w = catmull_rom(0.25f64);
        let v: f64 = data.iter().zip(w).map(|(y, c)| y * c).sum();
        assert!((v - 3.5).abs() < 1e-14);
    }

    #[test]
    fn wrap_pi_range() {
        for &x in &[-9.0f64, -3.2, 0.0, 3.1, 4.0, 12.0, 100.0] {
            let y = wrap_pi(x);
            assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&y));
            // same angle modulo 2 pi
            let d = (x - y) / (2.0 * std::f64::consts::PI);
            assert!((d - d.round()).abs() < 1e-12);
        }
    }
}
