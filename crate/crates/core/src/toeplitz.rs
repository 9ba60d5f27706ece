//! Banded Toeplitz constructors and the identities they satisfy.
//!
//! Entries follow `(T_N)_{i,j} = a_{j-i}`: `a_1` sits on the first
//! superdiagonal and `a_{-1}` on the first subdiagonal.

use alloc::vec::Vec;

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::LogDet;
use crate::matrix::ComplexMatrix;
use crate::symbol::Symbol;
use crate::C64;

/// Number of trapezoid nodes used by [`moment_rhs`].
pub const MOMENT_QUADRATURE_NODES: usize = 1 << 14;

/// Band split `(d̄1, d̄2)` of a shifted symbol, `d̄1 + d̄2 = d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftSpec {
    pub dbar1: usize,
    pub dbar2: usize,
}

impl ShiftSpec {
    pub fn new(dbar1: usize, dbar2: usize, symbol: &Symbol) -> Result<Self> {
        if dbar1 + dbar2 != symbol.degree() {
            return Err(Error::InvalidParameter("shift spec must satisfy dbar1 + dbar2 = d"));
        }
        Ok(Self { dbar1, dbar2 })
    }

    /// `(d1, d2)`, the unshifted band.
    pub fn natural(symbol: &Symbol) -> Self {
        Self {
            dbar1: symbol.d1(),
            dbar2: symbol.d2(),
        }
    }

    /// `(d, 0)`, the upper triangular embedding.
    pub fn upper(symbol: &Symbol) -> Self {
        Self {
            dbar1: symbol.degree(),
            dbar2: 0,
        }
    }
}

/// `T_N(a)`.
pub fn build(s: &Symbol, n: usize) -> ComplexMatrix {
    build_z(s, C64::new(0.0, 0.0), n)
}

/// `T_N(a) - z Id`.
pub fn build_z(s: &Symbol, z: C64, n: usize) -> ComplexMatrix {
    let d1 = s.d1() as isize;
    let d2 = s.d2() as isize;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let lo = i.saturating_sub(d2 as usize);
        let hi = (i + d1 as usize + 1).min(n);
        for j in lo..hi {
            m[(i, j)] = s.coeff(j as isize - i as isize);
        }
        m[(i, i)] -= z;
    }
    m
}

/// `T_N(z; d̄1, d̄2)`: entry `(i, j)` is `a'_{(j-i) + d1 - d̄1}` for
/// `-d̄2 <= j - i <= d̄1`, where `a'_k = a_k - z 1{k = 0}`.
pub fn build_shifted(s: &Symbol, z: C64, spec: ShiftSpec, n: usize) -> Result<ComplexMatrix> {
    if spec.dbar1 + spec.dbar2 != s.degree() {
        return Err(Error::InvalidParameter("shift spec must satisfy dbar1 + dbar2 = d"));
    }
    let offset = s.d1() as isize - spec.dbar1 as isize;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i.saturating_sub(spec.dbar2)..(i + spec.dbar1 + 1).min(n) {
            let k = j as isize - i as isize + offset;
            let mut v = s.coeff(k);
            if k == 0 {
                v -= z;
            }
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// `a_{d1} Π_ℓ (J_{N+d2} + λ_ℓ(z) Id)`, built by repeated bidiagonal
/// multiplication.
pub fn bidiagonal_product(s: &Symbol, z: C64, n: usize) -> Result<ComplexMatrix> {
    let prof = s.root_profile(z)?;
    let size = n + s.d2();
    let mut acc = ComplexMatrix::identity(size).scaled(s.leading(z));
    let j = ComplexMatrix::jordan(size);
    for &l in &prof.roots {
        let mut factor = j.clone();
        factor.shift_diagonal(l);
        acc = acc.matmul(&factor)?;
    }
    Ok(acc)
}

/// Largest entrywise deviation between the bidiagonal product and
/// `T_{N+d2}(z; d, 0)`.
pub fn bidiagonal_factor_check(s: &Symbol, z: C64, n: usize) -> Result<f64> {
    let prod = bidiagonal_product(s, z, n)?;
    let upper = build_shifted(s, z, ShiftSpec::upper(s), n + s.d2())?;
    prod.max_abs_diff(&upper)
}

/// Whether the word `J^{m1} (J*)^{n1} ⋯` has equal total exponents.
pub fn is_balanced(m: &[usize], n: &[usize]) -> bool {
    m.iter().sum::<usize>() == n.iter().sum::<usize>()
}

/// Exact trace of `J_N^{m1} (J_N^*)^{n1} ⋯ J_N^{mk} (J_N^*)^{nk}`.
///
/// Each factor maps basis vectors to basis vectors or zero (`J e_j =
/// e_{j-1}`, `J^* e_j = e_{j+1}`), so the trace counts the `j` that the word
/// returns to themselves.
pub fn trace_word(m: &[usize], n: &[usize], size: usize) -> Result<usize> {
    if m.len() != n.len() {
        return Err(Error::InvalidParameter("word exponent sequences differ in length"));
    }
    if m.iter().chain(n).any(|&e| e > size) {
        return Err(Error::InvalidParameter("word exponent exceeds matrix size"));
    }
    let count = (0..size)
        .filter(|&start| {
            let mut pos = start as isize;
            for (&mj, &nj) in m.iter().zip(n).rev() {
                pos += nj as isize;
                if pos >= size as isize {
                    return false;
                }
                pos -= mj as isize;
                if pos < 0 {
                    return false;
                }
            }
            pos == start as isize
        })
        .count();
    Ok(count)
}

/// `(1/N) tr ((z - T_N)(z - T_N)^*)^k` by dense multiplication.
pub fn moment_lhs(s: &Symbol, z: C64, k: usize, n: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("moment order must be >= 1"));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("matrix size must be >= 1"));
    }
    let a = build_z(s, z, n).scaled(C64::new(-1.0, 0.0));
    let gram = a.matmul(&a.adjoint())?;
    let mut power = gram.clone();
    for _ in 1..k.saturating_sub(1) {
        power = power.matmul(&gram)?;
    }
    let tr = if k == 1 {
        gram.trace()
    } else {
        // tr(P G) from the diagonal of the product only
        (0..n)
            .map(|i| (0..n).map(|j| power[(i, j)] * gram[(j, i)]).sum::<C64>())
            .sum()
    };
    Ok(tr.re / n as f64)
}

/// `E |z - a(U)|^{2k}` by the trapezoid rule on the unit circle.
pub fn moment_rhs(s: &Symbol, z: C64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("moment order must be >= 1"));
    }
    let nodes = MOMENT_QUADRATURE_NODES;
    let mut total = 0.0;
    for j in 0..nodes {
        let u = C64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
        total += (z - s.eval(u)?).norm_sqr().powi(k as i32);
    }
    Ok(total / nodes as f64)
}

/// Widom's expansion of `det T_N(z)`:
/// `Σ_{|I| = d1} C_I (a_{d1})^N Π_{ℓ∈I} λ_ℓ(z)^N` with
/// `C_I = Π_{j∈I, k∉I} λ_j / (λ_j - λ_k)`, evaluated term by term in log
/// space.
pub fn widom_sum(s: &Symbol, z: C64, n: usize) -> Result<LogDet> {
    let prof = s.root_profile(z)?;
    if prof.near_double {
        return Err(Error::NearDoubleRoot(prof.min_separation));
    }
    let d = s.degree();
    let d1 = s.d1();
    let lambdas = &prof.roots;
    let lead = s.leading(z);
    let nf = n as f64;

    let mut terms: Vec<(f64, C64)> = Vec::new();
    for mask in 0u64..(1u64 << d) {
        if mask.count_ones() as usize != d1 {
            continue;
        }
        let inside = |i: usize| mask & (1 << i) != 0;
        if (0..d).any(|i| inside(i) && lambdas[i].norm() == 0.0) {
            continue;
        }
        let mut log_mag = nf * lead.norm().ln();
        let mut phase = C64::from_polar(1.0, nf * lead.arg());
        for j in (0..d).filter(|&j| inside(j)) {
            let lj = lambdas[j];
            log_mag += nf * lj.norm().ln();
            phase *= C64::from_polar(1.0, nf * lj.arg());
            for k in (0..d).filter(|&k| !inside(k)) {
                let c = lj / (lj - lambdas[k]);
                log_mag += c.norm().ln();
                phase *= c / c.norm();
            }
        }
        terms.push((log_mag, phase));
    }
    Ok(log_sum(&terms))
}

/// `log|Σ_t phase_t e^{log_t}|` with the phase of the sum.
pub(crate) fn log_sum(terms: &[(f64, C64)]) -> LogDet {
    let max = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return LogDet::singular();
    }
    let sum: C64 = terms.iter().map(|&(l, p)| p * (l - max).exp()).sum();
    let r = sum.norm();
    if r == 0.0 {
        return LogDet::singular();
    }
    LogDet {
        log_abs: max + r.ln(),
        phase: sum / r,
        singular: false,
    }
}
