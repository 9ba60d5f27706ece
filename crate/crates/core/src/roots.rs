//! Simultaneous polynomial root finding (Aberth-Ehrlich).

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

/// Iteration cap for [`aberth`].
pub const MAX_ITER: usize = 200;
/// Backward-error tolerance: `|p(r)| <= RESIDUAL_TOL * sum_i |c_i| |r|^i`.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// `p(x)` and `p'(x)` for ascending coefficients.
#[inline]
pub fn horner(coeffs: &[C64], x: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// `sum_i |c_i| |x|^i`, the natural scale for the residual at `x`.
#[inline]
pub fn residual_scale(coeffs: &[C64], x: C64) -> f64 {
    let r = x.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Outcome of an Aberth run.
#[derive(Debug, Clone, PartialEq)]
pub struct Roots {
    pub roots: Vec<C64>,
    pub iterations: usize,
}

/// All roots of `sum_i coeffs[i] x^i`. The leading coefficient must be
/// nonzero. Exact zero roots (vanishing low-order coefficients) are split
/// off before iterating.
///
/// Initial guesses sit on the circle of radius `|c_0 / c_d|^{1/d}`, rotated
/// off the real axis so that conjugate-symmetric problems do not stall.
pub fn aberth(coeffs: &[C64]) -> Result<Roots> {
    let Some(lead) = coeffs.last() else {
        return Err(Error::InvalidParameter("empty polynomial"));
    };
    if lead.norm() == 0.0 {
        return Err(Error::InvalidParameter("leading coefficient is zero"));
    }
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let poly = &coeffs[zeros..];
    let d = poly.len() - 1;
    let mut out = vec![C64::new(0.0, 0.0); zeros];
    if d == 0 {
        return Ok(Roots {
            roots: out,
            iterations: 0,
        });
    }
    if d == 1 {
        out.push(-poly[0] / poly[1]);
        return Ok(Roots {
            roots: out,
            iterations: 0,
        });
    }

    let radius = (poly[0].norm() / poly[d].norm()).powf(1.0 / d as f64);
    let mut r: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / d as f64 + 0.4))
        .collect();
    let mut done = vec![false; d];
    let mut iterations = 0;
    let mut polish = 2;
    loop {
        if done.iter().all(|&x| x) {
            if polish == 0 {
                break;
            }
            polish -= 1;
        }
        if iterations >= MAX_ITER {
            return Err(Error::RootsNotConverged(MAX_ITER));
        }
        iterations += 1;
        for k in 0..d {
            let (p, dp) = horner(poly, r[k]);
            let scale = residual_scale(poly, r[k]);
            done[k] = p.norm() <= RESIDUAL_TOL * scale;
            if p.norm() == 0.0 {
                continue;
            }
            let repulsion: C64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = r[k] - r[j];
                    if diff.norm() == 0.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let corr = if dp.norm() == 0.0 {
                // stationary point: step off along a fixed direction
                C64::new(1e-3 * (1.0 + r[k].norm()), 1e-3)
            } else {
                let w = p / dp;
                let denom = C64::new(1.0, 0.0) - w * repulsion;
                if denom.norm() == 0.0 {
                    w
                } else {
                    w / denom
                }
            };
            if corr.re.is_finite() && corr.im.is_finite() {
                r[k] -= corr;
            }
        }
    }
    out.extend(r);
    Ok(Roots { roots: out, iterations })
}
