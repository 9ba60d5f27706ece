//! Noise ensembles `E_N` and the corner perturbation `Δ_N`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, smin};
use crate::matrix::ComplexMatrix;
use crate::symbol::Symbol;
use crate::{rng, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    GaussianReal,
    /// Independent real and imaginary parts of variance 1/2.
    GaussianComplex,
    Rademacher,
    /// `Bernoulli(p) * N(0, 1) / sqrt(p)`, unit variance.
    SparseBernoulliGaussian {
        p: f64,
    },
    /// `sqrt(N) U` with `U` Haar unitary.
    HaarScaled,
    /// Corner perturbation with entries `N^{-γ*} δ_{ij}` on the corner
    /// support; `transpose` swaps which corner carries width `d1`.
    CornerDelta {
        gamma_star: f64,
        transpose: bool,
    },
}

/// A noise ensemble together with its scaling exponent `γ` (the
/// perturbation is `N^{-γ} E_N`; corner perturbations carry their own
/// `γ*`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub gamma: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter("noise exponent gamma must be > 0"));
        }
        match kind {
            NoiseKind::SparseBernoulliGaussian { p } if !(p > 0.0 && p <= 1.0) => {
                Err(Error::InvalidParameter("sparsity p must lie in (0, 1]"))
            }
            NoiseKind::CornerDelta { gamma_star, .. } if !(gamma_star > 0.0) || !gamma_star.is_finite() => {
                Err(Error::InvalidParameter("gamma_star must be > 0"))
            }
            _ => Ok(Self { kind, gamma }),
        }
    }

    pub fn is_corner(&self) -> bool {
        matches!(self.kind, NoiseKind::CornerDelta { .. })
    }

    /// The perturbation actually added to `T_N`: `N^{-γ} E_N` for the
    /// ensembles, `Δ_N` for the corner kind.
    pub fn perturbation(&self, symbol: &Symbol, n: usize, seed: u64) -> Result<ComplexMatrix> {
        match self.kind {
            NoiseKind::CornerDelta { gamma_star, transpose } => {
                corner_delta_oriented(symbol, n, gamma_star, seed, transpose)
            }
            _ => Ok(sample(self, n, seed)?.scaled(C64::new((n as f64).powf(-self.gamma), 0.0))),
        }
    }
}

/// Unscaled `E_N`. Row `i` is drawn from stream `i` of `seed`, so the
/// result is independent of evaluation order.
pub fn sample(model: &NoiseModel, n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("matrix size must be >= 1"));
    }
    let row_fill = |f: &mut dyn FnMut(&mut rand_chacha::ChaCha8Rng) -> C64| {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let mut g = rng::stream(seed, i as u64);
            for _ in 0..n {
                data.push(f(&mut g));
            }
        }
        ComplexMatrix::from_row_major(n, n, data)
    };
    match model.kind {
        NoiseKind::GaussianReal => row_fill(&mut |g| C64::new(g.sample(StandardNormal), 0.0)),
        NoiseKind::GaussianComplex => row_fill(&mut |g| rng::complex_normal(g)),
        NoiseKind::Rademacher => row_fill(&mut |g| C64::new(if g.random::<bool>() { 1.0 } else { -1.0 }, 0.0)),
        NoiseKind::SparseBernoulliGaussian { p } => {
            let scale = 1.0 / p.sqrt();
            row_fill(&mut |g| {
                let keep = g.random::<f64>() < p;
                let x: f64 = g.sample(StandardNormal);
                C64::new(if keep { x * scale } else { 0.0 }, 0.0)
            })
        }
        NoiseKind::HaarScaled => Ok(haar_unitary(n, seed)?.scaled(C64::new((n as f64).sqrt(), 0.0))),
        NoiseKind::CornerDelta { .. } => Err(Error::InvalidParameter(
            "corner perturbations depend on the symbol; use corner_delta",
        )),
    }
}

/// Support of the corner perturbation: width `d1` in the lower-left corner
/// (`i - j ∈ {N-1, …, N-d1}`) and width `d2` in the upper-right corner
/// (`j - i ∈ {N-1, …, N-d2}`), indices 1-based. `transposed` swaps the two
/// widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerSupport {
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
    pub transposed: bool,
}

impl CornerSupport {
    pub fn new(n: usize, d1: usize, d2: usize) -> Result<Self> {
        if n <= d1.max(d2) {
            return Err(Error::InvalidParameter("matrix too small for the corner support"));
        }
        Ok(Self {
            n,
            d1,
            d2,
            transposed: false,
        })
    }

    pub fn transposed(mut self) -> Self {
        self.transposed = !self.transposed;
        self
    }

    fn widths(&self) -> (usize, usize) {
        if self.transposed {
            (self.d2, self.d1)
        } else {
            (self.d1, self.d2)
        }
    }

    /// Whether the 0-based cell `(i, j)` is in the support.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (lower, upper) = self.widths();
        let n = self.n as isize;
        let diff = i as isize - j as isize;
        (lower > 0 && diff >= n - lower as isize && diff < n) || (upper > 0 && -diff >= n - upper as isize && -diff < n)
    }

    /// 0-based cells in row-major order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.d1 * (self.d1 + 1) / 2 + self.d2 * (self.d2 + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `Δ_N` with entries `N^{-γ*} δ_{ij}`, `δ_{ij} ~ Uniform[1/2, 1]`, on the
/// corner support of `symbol`. Requires `γ* > d`.
pub fn corner_delta(symbol: &Symbol, n: usize, gamma_star: f64, seed: u64) -> Result<ComplexMatrix> {
    corner_delta_oriented(symbol, n, gamma_star, seed, false)
}

pub fn corner_delta_oriented(
    symbol: &Symbol,
    n: usize,
    gamma_star: f64,
    seed: u64,
    transpose: bool,
) -> Result<ComplexMatrix> {
    if !(gamma_star > symbol.degree() as f64) {
        return Err(Error::InvalidParameter("corner perturbation needs gamma_star > d"));
    }
    let mut support = CornerSupport::new(n, symbol.d1(), symbol.d2())?;
    if transpose {
        support = support.transposed();
    }
    let scale = (n as f64).powf(-gamma_star);
    let law = Uniform::new_inclusive(0.5, 1.0).map_err(|_| Error::InvalidParameter("uniform law"))?;
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, j) in support.cells() {
        let mut g = rng::stream(seed, (i * n + j) as u64);
        m[(i, j)] = C64::new(scale * law.sample(&mut g), 0.0);
    }
    Ok(m)
}

/// Empirical lower tail of `s_min(E_N + M_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SminTailReport {
    pub n: usize,
    pub smins: Vec<f64>,
    /// `(β, fraction of trials with s_min <= N^{-β})` for `β ∈ {1, 2, 4}`.
    pub fractions: Vec<(f64, f64)>,
}

pub fn smin_tail_check(model: &NoiseModel, shift: &ComplexMatrix, trials: usize, seed: u64) -> Result<SminTailReport> {
    let n = shift.ensure_square()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1"));
    }
    let smins = (0..trials)
        .map(|t| {
            let e = sample(model, n, rng::derive_seed(seed, &[n as u64, t as u64]))?;
            smin(&e.add(shift)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let fractions = [1.0, 2.0, 4.0]
        .iter()
        .map(|&beta| {
            let thr = (n as f64).powf(-beta);
            let hits = smins.iter().filter(|&&s| s <= thr).count();
            (beta, hits as f64 / trials as f64)
        })
        .collect();
    Ok(SminTailReport { n, smins, fractions })
}
