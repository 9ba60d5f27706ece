//! Singular values through the Hermitian symmetrization
//! `[0 C; C^* 0]`, plus the Stieltjes transform of the symmetrized
//! singular-value measure and matrix norms.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::hermitian::hermitian_eigenvalues;
use crate::matrix::ComplexMatrix;
use crate::{rng, C64};

/// The `2N x 2N` Hermitian matrix `[0 C; C^* 0]`.
pub fn symmetrize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    let mut s = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            s[(i, n + j)] = v;
            s[(n + j, i)] = v.conj();
        }
    }
    Ok(s)
}

/// Singular values of a square matrix, nonincreasing.
///
/// The spectrum of the symmetrization is `{±s_j}`; the `N` largest
/// eigenvalues are the singular values (tiny negative round-off is clamped).
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.ensure_square()?;
    let ev = hermitian_eigenvalues(&symmetrize(m)?)?;
    Ok(ev.iter().rev().take(n).map(|&x| x.max(0.0)).collect())
}

/// Stieltjes transform of the symmetrized singular-value measure,
/// `(1/2N) sum_j [1/(xi - s_j) + 1/(xi + s_j)]`.
pub fn stieltjes_from_singular_values(sv: &[f64], xi: C64) -> Result<C64> {
    if xi.im == 0.0 {
        return Err(Error::RealArgument);
    }
    if sv.is_empty() {
        return Err(Error::Empty);
    }
    let sum: C64 = sv.iter().map(|&s| (xi - s).inv() + (xi + s).inv()).sum();
    Ok(sum / (2.0 * sv.len() as f64))
}

/// `(1/2N) tr (xi - [0 C; C^* 0])^{-1}`.
pub fn stieltjes(m: &ComplexMatrix, xi: C64) -> Result<C64> {
    if xi.im == 0.0 {
        return Err(Error::RealArgument);
    }
    stieltjes_from_singular_values(&singular_values(m)?, xi)
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.hs_norm()
}

/// Power iteration on `M M^*`; returns `|M^* x|` for the final unit
/// iterate, a lower bound on the operator norm.
pub fn op_norm_est(m: &ComplexMatrix, iters: usize) -> Result<f64> {
    if iters == 0 {
        return Err(Error::InvalidParameter("op_norm_est needs iters >= 1"));
    }
    if m.rows() == 0 {
        return Ok(0.0);
    }
    let mut g = rng::stream(0x6f70_6e6f_726d, 0);
    let mut x: Vec<C64> = (0..m.rows()).map(|_| rng::complex_normal(&mut g)).collect();
    let mut est = 0.0;
    for _ in 0..iters {
        let nx = norm(&x);
        if nx == 0.0 {
            return Ok(0.0);
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = m.adjoint_mul_vec(&x);
        est = norm(&y);
        x = m.mul_vec(&y);
    }
    Ok(est)
}

/// Smallest singular value.
pub fn smin(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, hermitian_eigenvalues, Lu};
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn gaussian(n: usize, seed: u64) -> ComplexMatrix {
        let mut g = rng::stream(seed, 77);
        ComplexMatrix::from_fn(n, n, |_, _| rng::complex_normal(&mut g))
    }

    #[test]
    fn jordan_singular_values() {
        let s = singular_values(&ComplexMatrix::jordan(5)).unwrap();
        let expect = [1.0, 1.0, 1.0, 1.0, 0.0];
        for (a, b) in s.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(smin(&ComplexMatrix::jordan(5)).unwrap() < 1e-14);
    }

    #[test]
    fn diagonal_singular_values() {
        let s = singular_values(&ComplexMatrix::from_diag(&[c(3., 0.), c(0., -4.)])).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn squares_match_gram_eigenvalues() {
        let m = gaussian(6, 1);
        let s = singular_values(&m).unwrap();
        let gram = m.matmul(&m.adjoint()).unwrap();
        let mut ev = hermitian_eigenvalues(&gram).unwrap();
        ev.reverse();
        for (a, b) in s.iter().zip(&ev) {
            assert!((a * a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn unitarily_invariant() {
        let m = gaussian(8, 2);
        let u = haar_unitary(8, 3).unwrap();
        let v = haar_unitary(8, 4).unwrap();
        let w = u.matmul(&m).unwrap().matmul(&v).unwrap();
        let s1 = singular_values(&m).unwrap();
        let s2 = singular_values(&w).unwrap();
        for (a, b) in s1.iter().zip(&s2) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn stieltjes_closed_forms() {
        let g = stieltjes(&ComplexMatrix::zeros(3, 3), c(0., 1.)).unwrap();
        assert!((g - c(0., -1.)).norm() < 1e-15);
        let xi = c(0.3, 0.7);
        let g = stieltjes(&ComplexMatrix::identity(4), xi).unwrap();
        assert!((g - xi / (xi * xi - 1.0)).norm() < 1e-14);
        assert_eq!(
            stieltjes(&ComplexMatrix::identity(2), c(1., 0.)),
            Err(Error::RealArgument)
        );
    }

    #[test]
    fn stieltjes_matches_resolvent_trace() {
        let m = gaussian(5, 8);
        let xi = c(0.4, 0.9);
        let mut r = symmetrize(&m).unwrap().scaled(c(-1., 0.));
        r.shift_diagonal(xi);
        let lu = Lu::new(&r).unwrap();
        let n2 = r.rows();
        let mut tr = c(0., 0.);
        for k in 0..n2 {
            let mut e = vec![c(0., 0.); n2];
            e[k] = c(1., 0.);
            tr += lu.solve(&e).unwrap()[k];
        }
        let direct = tr / n2 as f64;
        let via_sv = stieltjes(&m, xi).unwrap();
        assert!((direct - via_sv).norm() < 1e-10);
    }

    #[test]
    fn herglotz_sign() {
        for seed in 0..5 {
            let m = gaussian(6, seed);
            for x in [-2.0, 0.0, 0.5, 3.0] {
                let g = stieltjes(&m, c(x, 0.25)).unwrap();
                assert!(g.im < 0.0);
            }
        }
    }

    #[test]
    fn norms() {
        assert!((hs_norm(&ComplexMatrix::identity(7)) - 7f64.sqrt()).abs() < 1e-15);
        let d = ComplexMatrix::from_diag(&[c(1., 0.), c(5., 0.)]);
        assert!((op_norm_est(&d, 50).unwrap() - 5.0).abs() < 1e-6);
        assert!(op_norm_est(&d, 0).is_err());
        let m = gaussian(10, 4);
        let est = op_norm_est(&m, 200).unwrap();
        let top = singular_values(&m).unwrap()[0];
        assert!(est <= top * (1.0 + 1e-12) && est >= 0.99 * top);
    }
}
