//! Laurent polynomial symbols `a(λ) = Σ_{k=-d2}^{d1} a_k λ^k`.
//!
//! Everything downstream is driven by the characteristic polynomial
//! `P_z(λ) = (a(λ) - z) λ^{d2}` of degree `d = d1 + d2`. A [`RootProfile`]
//! stores the *negated* roots `λ_ℓ(z)`, i.e. `P_z(-λ_ℓ(z)) = 0`, so that
//! upper triangular Toeplitz matrices factor as `a_{d1} Π (J + λ_ℓ Id)`.
//! Only moduli enter region labels and log-potentials, so the sign
//! convention matters only to phase-sensitive code such as the Widom sum.

use alloc::vec::Vec;

use core::f64::consts::PI;
use rand::Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::roots::{self, horner};
use crate::{rng, C64};

/// Root moduli within this distance of 1 are treated as on the unit circle.
pub const TOL_BOUNDARY: f64 = 1e-9;
/// Roots closer than this (relative to `max(1, |λ|)`) are flagged as a
/// near-double root.
pub const DOUBLE_ROOT_SEPARATION: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    /// `coeffs[k + d2] = a_k`.
    coeffs: Vec<C64>,
    d1: usize,
    d2: usize,
}

/// Region containing `z`, indexed by `𝔡 = d1 - d0(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Interior { dd: isize, d0: usize },
    Boundary,
}

impl RegionLabel {
    pub fn is_boundary(&self) -> bool {
        matches!(self, RegionLabel::Boundary)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootProfile {
    pub z: C64,
    /// `λ_1(z), …, λ_d(z)` by nonincreasing modulus.
    pub roots: Vec<C64>,
    /// Number of roots with modulus `>= 1`.
    pub d0: usize,
    /// `d1 - d0`.
    pub dd: isize,
    /// Some root modulus is within [`TOL_BOUNDARY`] of 1.
    pub boundary: bool,
    /// Two roots are within [`DOUBLE_ROOT_SEPARATION`] of each other.
    pub near_double: bool,
    pub min_separation: f64,
    pub iterations: usize,
}

/// Draws from `μ_a`, the law of `a(U)` with `U` uniform on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct MuASample {
    pub points: Vec<C64>,
    pub seed: u64,
}

impl Symbol {
    /// `coeffs` lists `a_{-d2}, …, a_{d1}`.
    pub fn new(coeffs: Vec<C64>, d1: usize, d2: usize) -> Result<Self> {
        if coeffs.len() != d1 + d2 + 1 {
            return Err(Error::InvalidSymbol("expected d1 + d2 + 1 coefficients"));
        }
        if d1 + d2 == 0 {
            return Err(Error::InvalidSymbol("symbol must be nonconstant"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidSymbol("coefficients must be finite"));
        }
        if coeffs[d1 + d2].norm() == 0.0 {
            return Err(Error::InvalidSymbol("a_{d1} must be nonzero"));
        }
        if d2 > 0 && coeffs[0].norm() == 0.0 {
            return Err(Error::InvalidSymbol("a_{-d2} must be nonzero"));
        }
        Ok(Self { coeffs, d1, d2 })
    }

    /// Symbol with real coefficients `a_{-d2}, …, a_{d1}`.
    pub fn from_real(coeffs: &[f64], d1: usize, d2: usize) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect(), d1, d2)
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn degree(&self) -> usize {
        self.d1 + self.d2
    }

    /// `a_{-d2}, …, a_{d1}`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `a_k`, zero outside the band.
    pub fn coeff(&self, k: isize) -> C64 {
        let idx = k + self.d2 as isize;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `c · a`.
    pub fn scaled(&self, c: C64) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect(), self.d1, self.d2)
    }

    /// `a(λ)`.
    pub fn eval(&self, lambda: C64) -> Result<C64> {
        if self.d2 > 0 && lambda.norm() == 0.0 {
            return Err(Error::ZeroArgument);
        }
        let (p, _) = horner(&self.coeffs, lambda);
        Ok(if self.d2 > 0 {
            p * lambda.powi(-(self.d2 as i32))
        } else {
            p
        })
    }

    /// Ascending coefficients of `(a(λ) - z) λ^{d2}`.
    pub fn char_poly(&self, z: C64) -> Vec<C64> {
        let mut c = self.coeffs.clone();
        c[self.d2] -= z;
        c
    }

    /// Leading coefficient of the characteristic polynomial, `a_{d1}`
    /// (or `a_0 - z` when `d1 = 0`).
    pub fn leading(&self, z: C64) -> C64 {
        *self.char_poly(z).last().expect("nonempty")
    }

    pub fn root_profile(&self, z: C64) -> Result<RootProfile> {
        let poly = self.char_poly(z);
        if poly[self.degree()].norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "characteristic polynomial drops degree at this z",
            ));
        }
        let found = roots::aberth(&poly)?;
        let mut lambdas: Vec<C64> = found.roots.iter().map(|r| -r).collect();
        sort_roots(&mut lambdas);

        let d0 = lambdas.iter().filter(|l| l.norm() >= 1.0).count();
        let boundary = lambdas.iter().any(|l| (l.norm() - 1.0).abs() < TOL_BOUNDARY);
        let mut min_separation = f64::INFINITY;
        for i in 0..lambdas.len() {
            for j in i + 1..lambdas.len() {
                let scale = lambdas[i].norm().max(lambdas[j].norm()).max(1.0);
                min_separation = min_separation.min((lambdas[i] - lambdas[j]).norm() / scale);
            }
        }
        Ok(RootProfile {
            z,
            roots: lambdas,
            d0,
            dd: self.d1 as isize - d0 as isize,
            boundary,
            near_double: min_separation < DOUBLE_ROOT_SEPARATION,
            min_separation,
            iterations: found.iterations,
        })
    }

    /// Region label `𝔡`, or [`RegionLabel::Boundary`] unless
    /// `|λ_{d0}| > 1 + tol` and `|λ_{d0+1}| < 1 - tol`.
    pub fn classify_region(&self, z: C64) -> Result<RegionLabel> {
        Ok(label_from_profile(&self.root_profile(z)?))
    }

    /// `log|a_{d1}| + Σ_k log_+ |λ_k(z)|`, the log-potential of `μ_a` at `z`.
    pub fn limit_logpot(&self, z: C64) -> Result<f64> {
        let prof = self.root_profile(z)?;
        Ok(logpot_from_profile(self, &prof))
    }

    /// `n` i.i.d. draws `a(e^{iΘ})`, `Θ ~ Uniform[0, 2π)`.
    pub fn sample_mu_a(&self, n: usize, seed: u64) -> Result<MuASample> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut g = rng::stream(seed, 0);
        let points = (0..n)
            .map(|_| {
                let theta = 2.0 * PI * g.random::<f64>();
                self.eval(C64::from_polar(1.0, theta))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MuASample { points, seed })
    }
}

pub fn label_from_profile(prof: &RootProfile) -> RegionLabel {
    let d = prof.roots.len();
    let above = if prof.d0 == 0 {
        f64::INFINITY
    } else {
        prof.roots[prof.d0 - 1].norm()
    };
    let below = if prof.d0 == d { 0.0 } else { prof.roots[prof.d0].norm() };
    if above > 1.0 + TOL_BOUNDARY && below < 1.0 - TOL_BOUNDARY {
        RegionLabel::Interior {
            dd: prof.dd,
            d0: prof.d0,
        }
    } else {
        RegionLabel::Boundary
    }
}

pub fn logpot_from_profile(symbol: &Symbol, prof: &RootProfile) -> f64 {
    symbol.leading(prof.z).norm().ln() + prof.roots.iter().map(|l| l.norm().ln().max(0.0)).sum::<f64>()
}

/// Nonincreasing modulus; ties (moduli equal to ~1e-12 relative) broken by
/// descending real part, then descending imaginary part.
fn sort_roots(r: &mut [C64]) {
    r.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let mut start = 0;
    while start < r.len() {
        let mut end = start + 1;
        while end < r.len() {
            let m = r[end - 1].norm();
            if (m - r[end].norm()).abs() > 1e-12 * m.max(1.0) {
                break;
            }
            end += 1;
        }
        r[start..end].sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;
    use crate::matrix::ComplexMatrix;
    use proptest::prelude::*;
    use std::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn limacon() -> Symbol {
        // λ + λ²
        Symbol::from_real(&[0.0, 1.0, 1.0], 2, 0).unwrap()
    }

    fn tridiagonal() -> Symbol {
        // λ + λ^{-1}
        Symbol::from_real(&[1.0, 0.0, 1.0], 1, 1).unwrap()
    }

    #[test]
    fn invariants_enforced() {
        assert!(Symbol::from_real(&[1.0], 0, 0).is_err());
        assert!(Symbol::from_real(&[1.0, 0.0], 1, 0).is_err());
        assert!(Symbol::from_real(&[0.0, 1.0, 1.0], 1, 1).is_err());
        assert!(Symbol::from_real(&[1.0, 1.0], 2, 0).is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(limacon().eval(c(1., 0.)).unwrap(), c(2., 0.));
        assert!((limacon().eval(c(0., 1.)).unwrap() - c(-1., 1.)).norm() < 1e-15);
        let v = tridiagonal().eval(C64::from_polar(1.0, PI / 3.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(tridiagonal().eval(c(0., 0.)), Err(Error::ZeroArgument));
    }

    #[test]
    fn root_profile_examples() {
        let s13 = 13f64.sqrt();
        let p = limacon().root_profile(c(3., 0.)).unwrap();
        assert!((p.roots[0].norm() - (1.0 + s13) / 2.0).abs() < 1e-12);
        assert!((p.roots[1].norm() - (s13 - 1.0) / 2.0).abs() < 1e-12);
        assert_eq!((p.d0, p.dd), (2, 0));
        assert!((p.roots[0].norm() - 2.30278).abs() < 1e-5);

        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let p = limacon().root_profile(c(1., 0.)).unwrap();
        assert!((p.roots[0].norm() - phi).abs() < 1e-12);
        assert!((p.roots[1].norm() - (phi - 1.0)).abs() < 1e-12);
        assert_eq!((p.d0, p.dd), (1, 1));

        let p = tridiagonal().root_profile(c(0., 0.)).unwrap();
        assert!(p.boundary);
        assert!((p.roots[0] - c(0., 1.)).norm() < 1e-12);
        assert!((p.roots[1] - c(0., -1.)).norm() < 1e-12);
    }

    #[test]
    fn stored_roots_are_negated_zeros() {
        let s = Symbol::new(vec![c(0.5, 0.2), c(-1.0, 0.0), c(0.3, 1.0), c(2.0, -0.5)], 2, 1).unwrap();
        let z = c(0.7, -0.4);
        let p = s.root_profile(z).unwrap();
        let poly = s.char_poly(z);
        for l in &p.roots {
            let (v, _) = horner(&poly, -l);
            assert!(v.norm() <= 1e-10 * roots::residual_scale(&poly, -l));
        }
        for w in p.roots.windows(2) {
            assert!(w[0].norm() >= w[1].norm());
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            limacon().classify_region(c(-0.1, 0.)).unwrap(),
            RegionLabel::Interior { dd: 2, d0: 0 }
        );
        let p = limacon().root_profile(c(-0.1, 0.)).unwrap();
        assert!((p.roots[0].norm() - 0.887298).abs() < 1e-6);
        assert!((p.roots[1].norm() - 0.112702).abs() < 1e-6);
        assert_eq!(
            limacon().classify_region(c(3., 0.)).unwrap(),
            RegionLabel::Interior { dd: 0, d0: 2 }
        );
        assert_eq!(limacon().classify_region(c(2., 0.)).unwrap(), RegionLabel::Boundary);
    }

    #[test]
    fn limit_logpot_examples() {
        assert!((limacon().limit_logpot(c(3., 0.)).unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!(limacon().limit_logpot(c(-0.1, 0.)).unwrap().abs() < 1e-15);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let v = limacon().limit_logpot(c(1., 0.)).unwrap();
        assert!((v - phi.ln()).abs() < 1e-12);
        assert!((v - 0.48121).abs() < 1e-5);
    }

    #[test]
    fn logpot_grows_like_log_modulus() {
        for s in [limacon(), tridiagonal()] {
            for k in 0..8 {
                let z = C64::from_polar(1e3, k as f64 * 0.7);
                assert!((s.limit_logpot(z).unwrap() - z.norm().ln()).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn mu_a_sampling() {
        let id = Symbol::from_real(&[0.0, 1.0], 1, 0).unwrap();
        let s = id.sample_mu_a(1000, 3).unwrap();
        assert!(s.points.iter().all(|p| (p.norm() - 1.0).abs() < 1e-14));
        assert_eq!(id.sample_mu_a(0, 1), Err(Error::Empty));

        let n = 100_000;
        let pts = limacon().sample_mu_a(n, 11).unwrap().points;
        let mean: C64 = pts.iter().sum::<C64>() / n as f64;
        assert!(mean.norm() < 3.0 / (n as f64).sqrt());
        // U itself is recovered by the identity symbol: moments E U^k = 1{k=0}
        let u = id.sample_mu_a(n, 12).unwrap().points;
        for k in 1..=4 {
            let m: C64 = u.iter().map(|p| p.powi(k)).sum::<C64>() / n as f64;
            assert!(m.norm() < 5.0 / (n as f64).sqrt());
        }
        assert_eq!(limacon().sample_mu_a(50, 4), limacon().sample_mu_a(50, 4));
    }

    #[test]
    fn region_labels_stable_under_small_moves() {
        let s = limacon();
        for &(x, y) in &[(-0.1, 0.0), (1.0, 0.0), (3.0, 0.0), (0.5, 1.5), (-1.5, -1.0)] {
            let z = c(x, y);
            let label = s.classify_region(z).unwrap();
            assert!(!label.is_boundary());
            for k in 0..8 {
                let eps = C64::from_polar(TOL_BOUNDARY / 10.0, k as f64 * PI / 4.0);
                assert_eq!(s.classify_region(z + eps).unwrap(), label);
            }
        }
    }

    fn companion_eigs(poly: &[C64]) -> Vec<C64> {
        let d = poly.len() - 1;
        let lead = poly[d];
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == 0 {
                -poly[d - 1 - j] / lead
            } else if j + 1 == i {
                c(1., 0.)
            } else {
                c(0., 0.)
            }
        });
        eigenvalues(&m).unwrap().eigenvalues
    }

    fn coeff_strategy(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn root_product_is_constant(
            d1 in 1usize..4,
            d2 in 1usize..4,
            raw in coeff_strategy(7),
            zs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 100),
        ) {
            let mut coeffs: Vec<C64> = raw[..d1 + d2 + 1].iter().map(|&(a, b)| c(a, b)).collect();
            coeffs[0] += c(0.5, 0.0);
            coeffs[d1 + d2] += c(0.5, 0.0);
            prop_assume!(coeffs[0].norm() > 0.1 && coeffs[d1 + d2].norm() > 0.1);
            let s = Symbol::new(coeffs.clone(), d1, d2).unwrap();
            let target = coeffs[0].norm() / coeffs[d1 + d2].norm();
            for &(x, y) in &zs {
                let prof = s.root_profile(c(x, y)).unwrap();
                let prod: f64 = prof.roots.iter().map(|l| l.norm()).product();
                prop_assert!((prod - target).abs() <= 1e-10 * target);
            }
        }

        #[test]
        fn aberth_matches_companion(roots in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..7)) {
            let rs: Vec<C64> = roots.iter().map(|&(a, b)| c(a, b)).collect();
            for i in 0..rs.len() {
                for j in i + 1..rs.len() {
                    prop_assume!((rs[i] - rs[j]).norm() > 0.2);
                }
            }
            // expand Π (x - r)
            let mut poly = vec![c(1., 0.)];
            for r in &rs {
                let mut next = vec![c(0., 0.); poly.len() + 1];
                for (k, p) in poly.iter().enumerate() {
                    next[k + 1] += p;
                    next[k] -= p * r;
                }
                poly = next;
            }
            let found = roots::aberth(&poly).unwrap().roots;
            let comp = companion_eigs(&poly);
            for z in &found {
                let best = comp.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-8);
            }
            for z in &comp {
                let best = found.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-8);
            }
        }
    }
}
