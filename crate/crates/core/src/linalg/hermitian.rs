//! Eigenvalues of Hermitian matrices.
//!
//! Householder reduction to a Hermitian tridiagonal matrix, a diagonal
//! unitary scaling that makes the off-diagonal real and nonnegative, and the
//! implicit-shift QL iteration on the resulting real symmetric tridiagonal.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::C64;

/// Reduces a Hermitian matrix (only the lower triangle is read) to real
/// symmetric tridiagonal form `(diag, offdiag)`; `offdiag[i]` couples `i`
/// and `i + 1`.
pub fn tridiagonalize(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.ensure_square()?;
    let mut a = m.clone();
    // symmetrize from the lower triangle
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in 0..i {
            a[(j, i)] = a[(i, j)].conj();
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut w = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let norm_x = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>();
        if norm_x == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let unit = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -unit * norm_x;
        let vk = &mut v[..len];
        for (t, i) in (k + 1..n).enumerate() {
            vk[t] = a[(i, k)];
        }
        vk[0] -= alpha;
        let vnorm = vk.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in vk.iter_mut() {
            *z /= vnorm;
        }
        // p = B v on the trailing block B = A[k+1.., k+1..]
        let wk = &mut w[..len];
        for (t, i) in (k + 1..n).enumerate() {
            let row = &a.row(i)[k + 1..];
            wk[t] = row.iter().zip(vk.iter()).map(|(b, x)| b * x).sum();
        }
        // K = v^* p is real for Hermitian B
        let kk: f64 = vk.iter().zip(wk.iter()).map(|(x, p)| x.conj() * p).sum::<C64>().re;
        for (p, x) in wk.iter_mut().zip(vk.iter()) {
            *p -= x * kk;
        }
        // B <- B - 2 v w^* - 2 w v^*
        for (t, i) in (k + 1..n).enumerate() {
            let vt = vk[t];
            let wt = wk[t];
            let row = &mut a.as_mut_slice()[i * n + k + 1..(i + 1) * n];
            for (s, r) in row.iter_mut().enumerate() {
                *r -= (vt * wk[s].conj() + wt * vk[s].conj()) * 2.0;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
            a[(k, i)] = C64::new(0.0, 0.0);
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    // |offdiag| is the unitary-diagonal-scaled real off-diagonal
    let off = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)].norm()).collect();
    Ok((diag, off))
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL,
/// returned in ascending order.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch("off-diagonal length"));
    }
    let mut d = diag.to_vec();
    // e[i] couples i and i+1; e[n-1] = 0 sentinel
    let mut e = off.to_vec();
    e.push(0.0);
    let max_iter = 30 * n.max(1);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::EigenNotConverged);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// All eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (d, e) = tridiagonalize(m)?;
    tridiagonal_eigenvalues(&d, &e)
}
