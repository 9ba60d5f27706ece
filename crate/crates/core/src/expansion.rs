//! Exact small-N oracles for the determinant expansion of `T_N(z) + Δ_N`.
//!
//! `det(A + B) = Σ_{|X|=|Y|} sgn(σ_X) sgn(σ_Y) det(A[X^c; Y^c]) det(B[X; Y])`
//! where `σ_Z` moves `Z` in front of its complement. Restricting the sum to
//! subsets of the nonzero rows and columns of `B` makes it cheap whenever
//! `B` is a corner perturbation. All index sets here are 0-based.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::E;

use rand::Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::matrix::ComplexMatrix;
use crate::stats::wilson_interval;
use crate::symbol::{label_from_profile, logpot_from_profile, RegionLabel, Symbol};
use crate::toeplitz::build_z;
use crate::{rng, C64};

/// Largest size accepted by [`det_sum_decomposition`].
pub const MAX_DECOMPOSITION_SIZE: usize = 12;
/// Largest size accepted by [`corner_pk`] and [`dominance_report`].
pub const MAX_CORNER_SIZE: usize = 60;

/// A pair of equal-size, strictly increasing index sets in `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetPair {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

impl SubsetPair {
    pub fn new(x: Vec<usize>, y: Vec<usize>, n: usize) -> Result<Self> {
        validate_subset(&x, n)?;
        validate_subset(&y, n)?;
        if x.len() != y.len() {
            return Err(Error::InvalidParameter("subsets must have equal size"));
        }
        Ok(Self { x, y })
    }
}

fn validate_subset(x: &[usize], n: usize) -> Result<()> {
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("subset must be strictly increasing"));
    }
    if x.last().is_some_and(|&v| v >= n) {
        return Err(Error::InvalidParameter("subset index out of range"));
    }
    Ok(())
}

/// `[0, n) \ x` for a sorted `x`.
pub fn complement(x: &[usize], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - x.len());
    let mut it = x.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}

/// All `k`-element subsets of `items`, each in increasing order.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        if idx[i] == i + items.len() - k {
            return out;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sign of the permutation placing `x` (order kept) before its complement:
/// `(-1)^{Σ_t (x_t - t)}`.
pub fn perm_sign(x: &[usize], n: usize) -> Result<i8> {
    validate_subset(x, n)?;
    let inversions: usize = x.iter().enumerate().map(|(t, &v)| v - t).sum();
    Ok(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

fn minor_det(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> Result<C64> {
    determinant(&m.select(rows, cols))
}

fn nonzero_rows_cols(b: &ComplexMatrix) -> (Vec<usize>, Vec<usize>) {
    let n = b.rows();
    let zero = C64::new(0.0, 0.0);
    let rows = (0..n).filter(|&i| b.row(i).iter().any(|&v| v != zero)).collect();
    let cols = (0..b.cols()).filter(|&j| (0..n).any(|i| b[(i, j)] != zero)).collect();
    (rows, cols)
}

/// Degree-`k` part of `det(A + B)`: the signed sum over `|X| = |Y| = k`,
/// with `X, Y` drawn from the nonzero rows and columns of `B`.
fn expansion_term(a: &ComplexMatrix, b: &ComplexMatrix, rows: &[usize], cols: &[usize], k: usize) -> Result<C64> {
    let n = a.rows();
    let mut total = C64::new(0.0, 0.0);
    let ys = combinations(cols, k);
    for x in combinations(rows, k) {
        let sx = perm_sign(&x, n)?;
        let xc = complement(&x, n);
        for y in &ys {
            let db = minor_det(b, &x, y)?;
            if db == C64::new(0.0, 0.0) {
                continue;
            }
            let sy = perm_sign(y, n)?;
            let da = minor_det(a, &xc, &complement(y, n))?;
            total += da * db * f64::from(sx * sy);
        }
    }
    Ok(total)
}

/// `det(A + B)` through the subset expansion.
pub fn det_sum_decomposition(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let n = a.ensure_square()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch("expansion operands"));
    }
    if n > MAX_DECOMPOSITION_SIZE {
        return Err(Error::SizeGuard {
            what: "N",
            got: n,
            limit: MAX_DECOMPOSITION_SIZE,
        });
    }
    let (rows, cols) = nonzero_rows_cols(b);
    let mut total = C64::new(0.0, 0.0);
    for k in 0..=rows.len().min(cols.len()) {
        total += expansion_term(a, b, &rows, &cols, k)?;
    }
    Ok(total)
}

/// Closed form of `det((J_N + 𝔷 Id)[X^c; Y^c])`: zero unless the sets
/// interleave as `y_i <= x_i < y_{i+1}`, otherwise a power of `𝔷`.
pub fn bidiag_subdet(zeta: C64, x: &[usize], y: &[usize], n: usize) -> Result<C64> {
    let pair = SubsetPair::new(x.to_vec(), y.to_vec(), n)?;
    let k = pair.x.len();
    if k == 0 {
        return Ok(zeta.powi(n as i32));
    }
    // 1-based from here on
    let xs: Vec<usize> = pair.x.iter().map(|v| v + 1).collect();
    let ys: Vec<usize> = pair.y.iter().map(|v| v + 1).collect();
    for i in 0..k {
        let next = if i + 1 < k { ys[i + 1] } else { usize::MAX };
        if !(ys[i] <= xs[i] && xs[i] < next) {
            return Ok(C64::new(0.0, 0.0));
        }
    }
    let mut exponent = ys[0] - 1 + n - xs[k - 1];
    for i in 1..k {
        exponent += ys[i] - xs[i - 1] - 1;
    }
    Ok(zeta.powi(exponent as i32))
}

fn corner_guard(delta: &ComplexMatrix) -> Result<usize> {
    let n = delta.ensure_square()?;
    if n > MAX_CORNER_SIZE {
        return Err(Error::SizeGuard {
            what: "N",
            got: n,
            limit: MAX_CORNER_SIZE,
        });
    }
    Ok(n)
}

/// `P_k(z)`, the part of `det(T_N(z) + Δ)` of degree `k` in the entries of
/// `Δ`. Vanishes for `k` above the number of nonzero rows of `Δ`.
pub fn corner_pk(s: &Symbol, z: C64, delta: &ComplexMatrix, k: usize) -> Result<C64> {
    let n = corner_guard(delta)?;
    let (rows, cols) = nonzero_rows_cols(delta);
    if k > rows.len().min(cols.len()) {
        return Ok(C64::new(0.0, 0.0));
    }
    expansion_term(&build_z(s, z, n), delta, &rows, &cols, k)
}

/// `P_0(z), …, P_d(z)`.
pub fn corner_expansion(s: &Symbol, z: C64, delta: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = corner_guard(delta)?;
    let t = build_z(s, z, n);
    let (rows, cols) = nonzero_rows_cols(delta);
    let top = rows.len().min(cols.len());
    (0..=s.degree())
        .map(|k| {
            if k > top {
                Ok(C64::new(0.0, 0.0))
            } else {
                expansion_term(&t, delta, &rows, &cols, k)
            }
        })
        .collect()
}

/// Diagnostics for the dominant term of the corner expansion at `z` with
/// region label `𝔡`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub n: usize,
    pub dd: isize,
    pub d0: usize,
    /// `P_0, …, P_d`.
    pub p: Vec<C64>,
    /// `N log|a_{d1}| + N Σ_{i <= d0} log|λ_i(z)|`.
    pub log_normalizer: f64,
    /// `|P_{|𝔡|}| / normalizer`.
    pub normalized_pd: f64,
    /// `|Σ_{k > |𝔡|} P_k| / |P_{|𝔡|}|`.
    pub ratio_above: f64,
    /// `|Σ_{k > |𝔡|} P_k| / normalizer`.
    pub above_normalized: f64,
    /// `Σ_{k < |𝔡|} |P_k| / normalizer`.
    pub ratio_below: f64,
}

pub fn dominance_report(s: &Symbol, z: C64, delta: &ComplexMatrix) -> Result<DominanceReport> {
    let n = corner_guard(delta)?;
    let prof = s.root_profile(z)?;
    let (dd, d0) = match label_from_profile(&prof) {
        RegionLabel::Interior { dd, d0 } => (dd, d0),
        RegionLabel::Boundary => return Err(Error::Boundary),
    };
    let p = corner_expansion(s, z, delta)?;
    let log_normalizer = n as f64 * logpot_from_profile(s, &prof);
    let norm = log_normalizer.exp();
    let kd = dd.unsigned_abs();
    let pd = p[kd].norm();
    let above: C64 = p[kd + 1..].iter().sum();
    let below: f64 = p[..kd].iter().map(|v| v.norm()).sum();
    Ok(DominanceReport {
        n,
        dd,
        d0,
        log_normalizer,
        normalized_pd: pd / norm,
        ratio_above: above.norm() / pd,
        above_normalized: above.norm() / norm,
        ratio_below: below / norm,
        p,
    })
}

/// Homogeneous multilinear polynomial `Σ_I a(I) Π_{i∈I} U_i` in `n_vars`
/// variables, every monomial of degree `k` with distinct variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearPoly {
    pub n_vars: usize,
    pub k: usize,
    pub terms: Vec<(Vec<usize>, C64)>,
}

impl MultilinearPoly {
    pub fn new(n_vars: usize, k: usize, terms: Vec<(Vec<usize>, C64)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("degree must be >= 1"));
        }
        for (vars, _) in &terms {
            if vars.len() != k {
                return Err(Error::InvalidParameter("monomial degree differs from k"));
            }
            let mut sorted = vars.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.last().is_some_and(|&v| v >= n_vars) {
                return Err(Error::InvalidParameter("monomials need distinct in-range variables"));
            }
        }
        let poly = Self { n_vars, k, terms };
        if poly.c_star() == 0.0 {
            return Err(Error::InvalidParameter("polynomial has no nonzero coefficient"));
        }
        Ok(poly)
    }

    /// Largest coefficient modulus.
    pub fn c_star(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, u: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(vars, a)| a * vars.iter().map(|&i| u[i]).product::<f64>())
            .sum()
    }

    /// `(8e)^k (c* ∧ 1)^{-1} ε log(1/ε)^{k-1}`.
    pub fn small_ball_bound(&self, eps: f64) -> f64 {
        (8.0 * E).powi(self.k as i32) / self.c_star().min(1.0) * eps * (1.0 / eps).ln().powi(self.k as i32 - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntiConcRow {
    pub eps: f64,
    pub hits: usize,
    pub trials: usize,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub bound: f64,
}

/// Monte-Carlo estimate of `P(|Q(U)| <= ε)` with `U_i ~ Uniform[0, 1]`
/// (density bounded by one), next to the small-ball bound.
pub fn anti_conc_experiment(
    poly: &MultilinearPoly,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<AntiConcRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1"));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e <= 1.0 / E)) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1/e]"));
    }
    let mut hits = vec![0usize; eps_grid.len()];
    let mut u = vec![0.0; poly.n_vars];
    for t in 0..trials {
        let mut g = rng::stream(seed, t as u64);
        for v in u.iter_mut() {
            *v = g.random::<f64>();
        }
        let q = poly.eval(&u).norm();
        for (h, &eps) in hits.iter_mut().zip(eps_grid) {
            if q <= eps {
                *h += 1;
            }
        }
    }
    Ok(eps_grid
        .iter()
        .zip(hits)
        .map(|(&eps, h)| {
            let (lo, hi) = wilson_interval(h, trials, 1.96);
            AntiConcRow {
                eps,
                hits: h,
                trials,
                frequency: h as f64 / trials as f64,
                wilson_low: lo,
                wilson_high: hi,
                bound: poly.small_ball_bound(eps),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::corner_delta;
    use crate::toeplitz::build_z;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn limacon() -> Symbol {
        Symbol::from_real(&[0.0, 1.0, 1.0], 2, 0).unwrap()
    }

    fn gaussian(n: usize, seed: u64) -> ComplexMatrix {
        let mut g = rng::stream(seed, 0);
        ComplexMatrix::from_fn(n, n, |_, _| rng::complex_normal(&mut g))
    }

    /// Determinant of the permutation matrix of `σ_X` (0-based).
    fn perm_matrix_det(x: &[usize], n: usize) -> C64 {
        let mut order = x.to_vec();
        order.extend(complement(x, n));
        let p = ComplexMatrix::from_fn(n, n, |i, j| if order[i] == j { c(1., 0.) } else { c(0., 0.) });
        determinant(&p).unwrap()
    }

    fn all_subsets(n: usize) -> Vec<Vec<usize>> {
        let items: Vec<usize> = (0..n).collect();
        (0..=n).flat_map(|k| combinations(&items, k)).collect()
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(&[1, 4, 6], 2), vec![vec![1, 4], vec![1, 6], vec![4, 6]]);
        assert_eq!(combinations(&[1, 4], 0), vec![Vec::<usize>::new()]);
        assert!(combinations(&[1], 2).is_empty());
        assert_eq!(all_subsets(4).len(), 16);
        assert_eq!(complement(&[1, 3], 5), vec![0, 2, 4]);
    }

    #[test]
    fn perm_sign_examples() {
        assert_eq!(perm_sign(&[], 3).unwrap(), 1);
        assert_eq!(perm_sign(&[1], 2).unwrap(), -1);
        // 1-based {1, 3} in N = 4
        assert_eq!(perm_sign(&[0, 2], 4).unwrap(), -1);
        for x in all_subsets(5) {
            assert_eq!(C64::from(f64::from(perm_sign(&x, 5).unwrap())), perm_matrix_det(&x, 5));
        }
        assert!(perm_sign(&[2, 1], 4).is_err());
        assert!(perm_sign(&[4], 4).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let a = gaussian(4, 1);
        let zero = ComplexMatrix::zeros(4, 4);
        let da = determinant(&a).unwrap();
        assert!((det_sum_decomposition(&a, &zero).unwrap() - da).norm() < 1e-12 * da.norm());
        let v = det_sum_decomposition(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::identity(2)).unwrap();
        assert!((v - c(1., 0.)).norm() < 1e-15);
        let mut b = ComplexMatrix::zeros(4, 4);
        b[(3, 0)] = c(0.5, 0.1);
        b[(1, 2)] = c(-1.0, 0.3);
        b[(2, 2)] = c(0.2, 0.0);
        let direct = determinant(&a.add(&b).unwrap()).unwrap();
        assert!((det_sum_decomposition(&a, &b).unwrap() - direct).norm() <= 1e-10 * direct.norm());
        assert!(matches!(
            det_sum_decomposition(&ComplexMatrix::zeros(13, 13), &ComplexMatrix::zeros(13, 13)),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn bidiag_examples() {
        let zeta = c(0.7, 0.3);
        assert_eq!(bidiag_subdet(zeta, &[], &[], 5).unwrap(), zeta.powi(5));
        // 1-based N=5, X={2}, Y={2}
        let v = bidiag_subdet(zeta, &[1], &[1], 5).unwrap();
        assert_eq!(v, zeta.powi(4));
        let mut a = ComplexMatrix::jordan(5);
        a.shift_diagonal(zeta);
        let direct = determinant(&a.select(&[0, 2, 3, 4], &[0, 2, 3, 4])).unwrap();
        assert!((direct - v).norm() < 1e-14);
        // y_1 > x_1 kills the term
        assert_eq!(bidiag_subdet(zeta, &[1], &[2], 5).unwrap(), c(0., 0.));
    }

    #[test]
    fn bidiag_exhaustive() {
        for n in 1..=6 {
            for zeta in [c(0.7, 0.3), c(-1.3, 0.0), c(0.0, 0.0)] {
                let mut a = ComplexMatrix::jordan(n);
                a.shift_diagonal(zeta);
                let subsets = all_subsets(n);
                for x in &subsets {
                    for y in subsets.iter().filter(|y| y.len() == x.len()) {
                        let closed = bidiag_subdet(zeta, x, y, n).unwrap();
                        let dense = determinant(&a.select(&complement(x, n), &complement(y, n))).unwrap();
                        assert!((closed - dense).norm() < 1e-12, "n={n} x={x:?} y={y:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn upper_bidiagonal_minor_is_diagonal_product() {
        for n in 1..=5 {
            let mut g = rng::stream(n as u64, 3);
            let a = ComplexMatrix::from_fn(n, n, |i, j| {
                if j == i || j == i + 1 {
                    rng::complex_normal(&mut g)
                } else {
                    c(0., 0.)
                }
            });
            let subsets = all_subsets(n);
            for x in &subsets {
                for y in subsets.iter().filter(|y| y.len() == x.len()) {
                    let dense = determinant(&a.select(x, y)).unwrap();
                    let diag: C64 = x.iter().zip(y).map(|(&i, &j)| a[(i, j)]).product();
                    assert!((dense - diag).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn decomposition_random_pairs() {
        let mut g = rng::stream(77, 0);
        for case in 0..200 {
            let n = 1 + case % 6;
            let a = gaussian(n, 1000 + case as u64);
            let sparse = case % 2 == 0;
            let b = ComplexMatrix::from_fn(n, n, |_, _| {
                let v = rng::complex_normal(&mut g);
                if sparse && g.random::<f64>() < 0.7 {
                    c(0., 0.)
                } else {
                    v
                }
            });
            let direct = determinant(&a.add(&b).unwrap()).unwrap();
            let expanded = det_sum_decomposition(&a, &b).unwrap();
            assert!((direct - expanded).norm() <= 1e-9 * direct.norm().max(1e-300));
        }
    }

    #[test]
    fn corner_pk_examples() {
        let s = limacon();
        let z = c(1., 0.);
        let n = 10;
        let delta = corner_delta(&s, n, 3.0, 8).unwrap();
        let p0 = corner_pk(&s, z, &delta, 0).unwrap();
        assert!((p0 - determinant(&build_z(&s, z, n)).unwrap()).norm() < 1e-12);
        assert_eq!(corner_pk(&s, z, &delta, 3).unwrap(), c(0., 0.));
        let p = corner_expansion(&s, z, &delta).unwrap();
        let total: C64 = p.iter().sum();
        let direct = determinant(&build_z(&s, z, n).add(&delta).unwrap()).unwrap();
        assert!((total - direct).norm() <= 1e-9 * direct.norm());
        assert_eq!(p[1], corner_pk(&s, z, &delta, 1).unwrap());
    }

    #[test]
    fn corner_expansion_sums_to_determinant() {
        let syms = [
            limacon(),
            Symbol::from_real(&[1.0, 0.0, 1.0], 1, 1).unwrap(),
            Symbol::new(vec![c(0.5, 0.1), c(-1., 0.), c(0.3, 1.), c(2., 0.)], 2, 1).unwrap(),
        ];
        for (t, s) in syms.iter().enumerate() {
            for &z in &[c(3., 0.), c(0.2, 0.4), c(-0.1, 0.)] {
                let n = 12;
                let delta = corner_delta(s, n, s.degree() as f64 + 1.0, t as u64).unwrap();
                let total: C64 = corner_expansion(s, z, &delta).unwrap().iter().sum();
                let direct = determinant(&build_z(s, z, n).add(&delta).unwrap()).unwrap();
                assert!((total - direct).norm() <= 1e-9 * direct.norm());
            }
        }
    }

    #[test]
    fn dominance_at_outer_region() {
        let s = limacon();
        let delta = corner_delta(&s, 40, 3.0, 1).unwrap();
        let r = dominance_report(&s, c(3., 0.), &delta).unwrap();
        assert_eq!((r.dd, r.d0), (0, 2));
        assert!(r.ratio_above < 0.1);
        assert!(r.ratio_below == 0.0);
        assert!(dominance_report(&s, c(2., 0.), &delta).is_err());
    }

    #[test]
    fn anti_concentration_uniform_cdf() {
        let q = MultilinearPoly::new(1, 1, vec![(vec![0], c(1., 0.))]).unwrap();
        let rows = anti_conc_experiment(&q, &[0.1], 20_000, 3).unwrap();
        assert!((rows[0].frequency - 0.1).abs() < 0.01);
        assert!((rows[0].bound - 8.0 * E * 0.1).abs() < 1e-12);
        assert!(rows[0].wilson_low <= 0.1 && 0.1 <= rows[0].wilson_high);
    }

    #[test]
    fn anti_concentration_bound_at_threshold() {
        let q = MultilinearPoly::new(4, 2, vec![(vec![0, 1], c(1., 0.)), (vec![2, 3], c(-1., 0.))]).unwrap();
        let rows = anti_conc_experiment(&q, &[1.0 / E], 1000, 1).unwrap();
        assert!((rows[0].bound - (8.0 * E).powi(2) / E).abs() < 1e-9);
        assert!(rows[0].frequency <= 1.0 && rows[0].frequency <= rows[0].bound);
        assert!(anti_conc_experiment(&q, &[0.5], 10, 1).is_err());
        assert!(MultilinearPoly::new(4, 2, vec![(vec![0, 0], c(1., 0.))]).is_err());
        assert!(MultilinearPoly::new(4, 2, vec![(vec![0], c(1., 0.))]).is_err());
    }
}
