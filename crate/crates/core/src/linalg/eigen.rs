//! Eigenvalues of general complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! implicit QR sweeps (Givens bulge chasing) with Wilkinson shifts and
//! deflation on negligible subdiagonal entries. Only eigenvalues are
//! computed, so transformations are confined to the active block.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<C64>,
    /// Total number of QR sweeps.
    pub iterations: usize,
    pub converged: bool,
}

/// Unitary similarity to upper Hessenberg form.
pub fn hessenberg(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    let mut a = m.clone();
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let norm_x = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let unit = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -unit * norm_x;
        // v = x - alpha e1, normalized
        let len = n - k - 1;
        let vk = &mut v[..len];
        for (t, i) in (k + 1..n).enumerate() {
            vk[t] = a[(i, k)];
        }
        vk[0] -= alpha;
        let vnorm = vk.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in vk.iter_mut() {
            *z /= vnorm;
        }
        // A <- (I - 2 v v^*) A on rows k+1.., columns k..
        for j in k..n {
            let mut s = C64::new(0.0, 0.0);
            for (t, i) in (k + 1..n).enumerate() {
                s += vk[t].conj() * a[(i, j)];
            }
            s *= 2.0;
            for (t, i) in (k + 1..n).enumerate() {
                a[(i, j)] -= vk[t] * s;
            }
        }
        // A <- A (I - 2 v v^*) on columns k+1.., all rows
        for i in 0..n {
            let row = &mut a.as_mut_slice()[i * n + k + 1..(i + 1) * n];
            let mut s = C64::new(0.0, 0.0);
            for (t, r) in row.iter().enumerate() {
                s += *r * vk[t];
            }
            s *= 2.0;
            for (t, r) in row.iter_mut().enumerate() {
                *r -= s * vk[t].conj();
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    Ok(a)
}

/// Rotation `G = [c s; -conj(s) c]` with `G [x; y] = [r; 0]`.
#[inline]
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    let c = ax / r;
    let s = x * y.conj() / (ax * r);
    (c, s)
}

/// Eigenvalue of the 2x2 block `[a b; c d]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = (a + d) * 0.5 + disc;
    let mu2 = (a + d) * 0.5 - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// All eigenvalues of a square complex matrix.
///
/// `converged` is false if some eigenvalue fails to deflate within `30 n`
/// sweeps; the eigenvalues deflated so far are still returned.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<SpectrumResult> {
    let n = m.ensure_square()?;
    let mut h = hessenberg(m)?;
    let mut eigs = vec![C64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(SpectrumResult {
            eigenvalues: eigs,
            iterations: 0,
            converged: true,
        });
    }
    let eps = f64::EPSILON;
    let fallback_scale = h.max_abs().max(f64::MIN_POSITIVE);
    let max_iter = 30 * n;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    let mut found = vec![false; n];

    loop {
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            found[0] = true;
            break;
        }
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = fallback_scale;
            }
            if sub <= eps * scale {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[(hi, hi)];
            found[hi] = true;
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= max_iter {
            let eigenvalues = (0..n).filter(|&i| found[i]).map(|i| eigs[i]).collect();
            return Ok(SpectrumResult {
                eigenvalues,
                iterations: total,
                converged: false,
            });
        }
        total += 1;
        its += 1;

        let shift = if its.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let col_start = if k == lo { lo } else { k - 1 };
            for j in col_start..=hi {
                let hk = h[(k, j)];
                let hk1 = h[(k + 1, j)];
                h[(k, j)] = hk * c + s * hk1;
                h[(k + 1, j)] = -s.conj() * hk + hk1 * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            let row_end = (k + 2).min(hi);
            for i in lo..=row_end {
                let hk = h[(i, k)];
                let hk1 = h[(i, k + 1)];
                h[(i, k)] = hk * c + hk1 * s.conj();
                h[(i, k + 1)] = -hk * s + hk1 * c;
            }
        }
    }

    Ok(SpectrumResult {
        eigenvalues: eigs,
        iterations: total,
        converged: true,
    })
}
