//! Cyclic Jacobi eigensolver for small complex Hermitian matrices. The
//! plane-wave band solver needs all eigenpairs of matrices of dimension at
//! most a couple hundred, where Jacobi is plenty fast, unconditionally
//! stable, and keeps the dependency surface flat.

use crate::scalar::Real;
use crate::C;

/// Dense Hermitian matrix in row-major order.
#[derive(Clone, Debug)]
pub struct HermMatrix<T> {
    pub n: usize,
    pub a: Vec<C<T>>,
}

impl<T: Real> HermMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        HermMatrix { n, a: vec![C::new(T::zero(), T::zero()); n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C<T> {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.a[i * self.n + j] = v;
    }

    fn off_norm2(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                s += self.at(i, j).norm_sqr();
            }
        }
        s
    }
}

/// Eigen-decomposition: `values` ascending, `vectors[j]` the unit eigenvector
/// for `values[j]`.
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<C<T>>>,
}

/// All eigenpairs by cyclic Jacobi sweeps with complex plane rotations.
pub fn eigh<T: Real>(m: &HermMatrix<T>) -> Eigen<T> {
    let n = m.n;
    let mut a = m.clone();
    // enforce exact Hermitian symmetry of the working copy
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a.at(i, j) + a.at(j, i).conj()) * T::lit(0.5);
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
        let d = a.at(i, i);
        a.set(i, i, C::new(d.re, T::zero()));
    }
    let mut v: Vec<C<T>> = vec![C::new(T::zero(), T::zero()); n * n];
    for i in 0..n {
        v[i * n + i] = C::new(T::one(), T::zero());
    }
    let scale = {
        let mut s = T::zero();
        for i in 0..n {
            s += a.at(i, i).re.abs();
        }
        s.max(T::one())
    };
    let tol = T::lit(1e-30) * scale * scale;
    for _sweep in 0..60 {
        if a.off_norm2() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                let r = apq.norm();
                if r <= T::lit(1e-300) {
                    continue;
                }
                let phase = apq / C::new(r, T::zero());
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                let tau = (aqq - app) / (T::lit(2.0) * r);
                let t = {
                    let s = if tau >= T::zero() { T::one() } else { -T::one() };
                    s / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // unitary G: G[p][p]=c, G[p][q]=s*phase, G[q][p]=-s*conj(phase), G[q][q]=c
                let gpq = phase * s;
                let gqp = -phase.conj() * s;
                // A <- A G (columns p, q), then A <- G^H A (rows p, q)
                for i in 0..n {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    a.set(i, p, aip * c + aiq * gqp);
                    a.set(i, q, aip * gpq + aiq * c);
                }
                for j in 0..n {
                    let apj = a.at(p, j);
                    let aqj = a.at(q, j);
                    let new_pj = apj * c + aqj * gqp.conj();
                    let new_qj = apj * gpq.conj() + aqj * c;
                    a.set(p, j, new_pj);
                    a.set(q, j, new_qj);
                }
                // clean the rotated pair to exact Hermitian form
                let d1 = a.at(p, p);
                let d2 = a.at(q, q);
                a.set(p, p, C::new(d1.re, T::zero()));
                a.set(q, q, C::new(d2.re, T::zero()));
                let z = (a.at(p, q) + a.at(q, p).conj()) * T::lit(0.5);
                a.set(p, q, z);
                a.set(q, p, z.conj());
                // accumulate eigenvectors: V <- V G
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = vip * c + viq * gqp;
                    v[i * n + q] = vip * gpq + viq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.at(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let vectors: Vec<Vec<C<T>>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i * n + j]).collect())
        .collect();
    Eigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat_from(rows: &[&[(f64, f64)]]) -> HermMatrix<f64> {
        let n = rows.len();
        let mut m = HermMatrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            for (j, &(re, im)) in r.iter().enumerate() {
                m.set(i, j, C::new(re, im));
            }
        }
        m
    }

    #[test]
    fn two_by_two_hermitian() {
        // [[2, i],[-i, 2]] has eigenvalues 1 and 3
        let m = mat_from(&[&[(2.0, 0.0), (0.0, 1.0)], &[(0.0, -1.0), (2.0, 0.0)]]);
        let e = eigh(&m);
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn residual_and_orthonormality_random_hermitian() {
        // deterministic pseudo-random Hermitian fill
        let n = 24;
        let mut m = HermMatrix::zeros(n);
        let mut state = 0x243F_6A88_85A3_08D3u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            let d = rnd();
            m.set(i, i, C::new(d, 0.0));
            for j in (i + 1)..n {
                let z = C::new(rnd(), rnd());
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        let e = eigh(&m);
        // eigen-residual
        for (lam, vec) in e.values.iter().zip(&e.vectors) {
            let mut max_res = 0.0f64;
            for i in 0..n {
                let mut av = C::new(0.0, 0.0);
                for j in 0..n {
                    av += m.at(i, j) * vec[j];
                }
                max_res = max_res.max((av - vec[i] * lam).norm());
            }
            assert!(max_res < 1e-10, "residual {max_res}");
        }
        // orthonormality
        for a in 0..n {
            for b in a..n {
                let mut dot = C::new(0.0, 0.0);
                for i in 0..n {
                    dot += e.vectors[a][i].conj() * e.vectors[b][i];
                }
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot.norm() - expect).abs() < 1e-10);
            }
        }
        // sorted ascending
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1] + 1e-14);
        }
    }
}
