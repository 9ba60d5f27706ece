//! LU factorization with partial pivoting.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::C64;

/// `log|det|` used for singular matrices. Callers branch on
/// [`LogDet::singular`], never on this value.
pub const SINGULAR_LOG_ABS: f64 = -1e300;

/// Determinant in polar form, `det = phase * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: C64,
    pub singular: bool,
}

impl LogDet {
    pub fn singular() -> Self {
        Self {
            log_abs: SINGULAR_LOG_ABS,
            phase: C64::new(1.0, 0.0),
            singular: true,
        }
    }

    /// Polar form of a nonzero complex number; zero maps to the singular value.
    pub fn from_complex(z: C64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            Self::singular()
        } else {
            Self {
                log_abs: r.ln(),
                phase: z / r,
                singular: false,
            }
        }
    }

    /// Reconstructs the determinant; overflows to infinity for huge values.
    pub fn value(&self) -> C64 {
        if self.singular {
            C64::new(0.0, 0.0)
        } else {
            self.phase * self.log_abs.exp()
        }
    }
}

/// Packed LU factors: unit lower triangle below the diagonal, `U` on and
/// above it, with the row permutation applied to the input.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let n = m.ensure_square()?;
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, a[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                continue;
            }
            if p != k {
                let data = a.as_mut_slice();
                for j in 0..n {
                    data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[(k, k)];
            let data = a.as_mut_slice();
            let (upper, lower) = data.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n..(k + 1) * n];
            for row in lower.chunks_exact_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    row[j] -= l * pivot_row[j];
                }
            }
        }
        Ok(Self {
            factors: a,
            perm,
            swaps,
        })
    }

    pub fn dim(&self) -> usize {
        self.factors.rows()
    }

    pub fn logdet(&self) -> LogDet {
        let n = self.dim();
        let mut log_abs = 0.0;
        let mut phase = if self.swaps.is_multiple_of(2) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        for i in 0..n {
            let u = self.factors[(i, i)];
            let r = u.norm();
            if !(r >= f64::MIN_POSITIVE) {
                return LogDet::singular();
            }
            log_abs += r.ln();
            phase *= u / r;
        }
        // keep the phase on the unit circle after many products
        phase /= phase.norm();
        LogDet {
            log_abs,
            phase,
            singular: false,
        }
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch("right-hand side length"));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.factors.row(i);
            let s: C64 = (0..i).map(|j| row[j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.factors.row(i);
            let s: C64 = (i + 1..n).map(|j| row[j] * x[j]).sum();
            let u = row[i];
            if u.norm() == 0.0 {
                return Err(Error::InvalidParameter("singular matrix in solve"));
            }
            x[i] = (x[i] - s) / u;
        }
        Ok(x)
    }
}

/// `log|det M|` and the phase of `det M` by partial-pivoted LU.
pub fn lu_logdet(m: &ComplexMatrix) -> Result<LogDet> {
    Ok(Lu::new(m)?.logdet())
}

/// `det M` as a complex number. Size-zero matrices have determinant one.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    if m.rows() == 0 && m.cols() == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(lu_logdet(m)?.value())
}
