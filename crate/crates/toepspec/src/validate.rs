//! The `validate` suite: exact identities and kernel cross-checks that
//! must hold on any build, sized to finish in seconds.

use std::f64::consts::PI;

use toepspec_core::expansion::{bidiag_subdet, combinations, complement, corner_expansion, det_sum_decomposition};
use toepspec_core::linalg::{
    determinant, eigenvalues, hermitian_eigenvalues, lu_logdet, singular_values, stieltjes_from_singular_values,
};
use toepspec_core::noise::corner_delta;
use toepspec_core::rng::{complex_normal, stream};
use toepspec_core::toeplitz::{build, build_z, moment_lhs, moment_rhs, widom_sum};
use toepspec_core::{ComplexMatrix, RegionLabel, Symbol, C64};

use crate::harness::{anti_conc_test_polynomial, interval_mass_check, run_anti_conc, stieltjes_bound};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

pub fn limacon() -> Symbol {
    Symbol::from_real(&[0.0, 1.0, 1.0], 2, 0).expect("valid symbol")
}

pub fn tridiagonal() -> Symbol {
    Symbol::from_real(&[1.0, 0.0, 1.0], 1, 1).expect("valid symbol")
}

fn gaussian(n: usize, seed: u64) -> ComplexMatrix {
    let mut g = stream(seed, 0);
    ComplexMatrix::from_fn(n, n, |_, _| complex_normal(&mut g))
}

fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    let items: Vec<usize> = (0..n).collect();
    (0..=n).flat_map(|k| combinations(&items, k)).collect()
}

fn run<F: FnOnce() -> Result<(bool, String), String>>(name: &'static str, f: F) -> Check {
    match f() {
        Ok((ok, detail)) => Check::new(name, ok, detail),
        Err(e) => Check::new(name, false, format!("error: {e}")),
    }
}

/// Max error of the `N = 100` tridiagonal spectrum against `2 cos(kπ/101)`.
pub fn tridiagonal_spectrum_error(n: usize) -> Result<f64, String> {
    let ev = eigenvalues(&build(&tridiagonal(), n)).map_err(|e| e.to_string())?;
    let mut got: Vec<f64> = ev.eigenvalues.iter().map(|z| z.re).collect();
    let max_im = ev.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = (1..=n)
        .map(|k| 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
        .collect();
    want.sort_by(f64::total_cmp);
    Ok(got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(max_im, f64::max))
}

pub fn suite() -> Vec<Check> {
    let mut out = Vec::new();

    out.push(run("kernel: tridiagonal Toeplitz spectrum", || {
        let err = tridiagonal_spectrum_error(100)?;
        Ok((err < 1e-8, format!("max error {err:.2e}")))
    }));

    out.push(run("kernel: singular values vs LU and HS norm", || {
        let m = gaussian(40, 5);
        let sv = singular_values(&m).map_err(|e| e.to_string())?;
        let log_prod: f64 = sv.iter().map(|s| s.ln()).sum();
        let ld = lu_logdet(&m).map_err(|e| e.to_string())?.log_abs;
        let hs2: f64 = sv.iter().map(|s| s * s).sum();
        let e1 = (log_prod - ld).abs();
        let e2 = (hs2 - m.hs_norm().powi(2)).abs() / hs2;
        Ok((e1 < 1e-9 && e2 < 1e-12, format!("logdet err {e1:.2e}, HS err {e2:.2e}")))
    }));

    out.push(run("kernel: Hermitian eigenvalues vs trace moments", || {
        let g = gaussian(30, 6);
        let h = g.add(&g.adjoint()).map_err(|e| e.to_string())?;
        let ev = hermitian_eigenvalues(&h).map_err(|e| e.to_string())?;
        let t1 = (ev.iter().sum::<f64>() - h.trace().re).abs();
        let h2 = h.matmul(&h).map_err(|e| e.to_string())?;
        let t2 = (ev.iter().map(|x| x * x).sum::<f64>() - h2.trace().re).abs() / h2.trace().re;
        Ok((
            t1 < 1e-9 && t2 < 1e-12,
            format!("tr err {t1:.2e}, tr^2 rel err {t2:.2e}"),
        ))
    }));

    out.push(run("expansion: subset decomposition vs determinant", || {
        let mut worst: f64 = 0.0;
        for case in 0..100u64 {
            let n = 1 + (case as usize % 6);
            let a = gaussian(n, 100 + case);
            let mut b = gaussian(n, 500 + case);
            if case % 2 == 0 {
                let mut g = stream(case, 9);
                for v in b.as_mut_slice() {
                    // zero out roughly a third of the entries
                    if complex_normal(&mut g).re < -0.5 {
                        *v = C64::new(0.0, 0.0);
                    }
                }
            }
            let direct = determinant(&a.add(&b).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let sum = det_sum_decomposition(&a, &b).map_err(|e| e.to_string())?;
            worst = worst.max((direct - sum).norm() / direct.norm());
        }
        Ok((worst < 1e-9, format!("max rel err {worst:.2e}")))
    }));

    out.push(run("expansion: bidiagonal minors closed form", || {
        let mut worst: f64 = 0.0;
        for n in 1..=5 {
            let zeta = C64::new(0.6, -0.4);
            let mut a = ComplexMatrix::jordan(n);
            a.shift_diagonal(zeta);
            let subsets = all_subsets(n);
            for x in &subsets {
                for y in subsets.iter().filter(|y| y.len() == x.len()) {
                    let closed = bidiag_subdet(zeta, x, y, n).map_err(|e| e.to_string())?;
                    let dense =
                        determinant(&a.select(&complement(x, n), &complement(y, n))).map_err(|e| e.to_string())?;
                    worst = worst.max((closed - dense).norm());
                }
            }
        }
        Ok((worst < 1e-12, format!("max abs err {worst:.2e}")))
    }));

    out.push(run("expansion: corner terms sum to the determinant", || {
        let s = limacon();
        let mut worst: f64 = 0.0;
        for (i, &z) in [C64::new(3.0, 0.0), C64::new(1.0, 0.0), C64::new(-0.1, 0.0)]
            .iter()
            .enumerate()
        {
            let delta = corner_delta(&s, 15, 3.0, i as u64).map_err(|e| e.to_string())?;
            let p = corner_expansion(&s, z, &delta).map_err(|e| e.to_string())?;
            let total: C64 = p.iter().sum();
            let direct =
                determinant(&build_z(&s, z, 15).add(&delta).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            worst = worst.max((total - direct).norm() / direct.norm());
        }
        Ok((worst < 1e-9, format!("max rel err {worst:.2e}")))
    }));

    out.push(run("toeplitz: Widom sum vs LU", || {
        let mut worst: f64 = 0.0;
        for s in [limacon(), tridiagonal()] {
            for &z in &[C64::new(3.0, 0.5), C64::new(1.0, 0.0), C64::new(-0.1, 0.2)] {
                let w = widom_sum(&s, z, 30).map_err(|e| e.to_string())?;
                let l = lu_logdet(&build_z(&s, z, 30)).map_err(|e| e.to_string())?;
                worst = worst.max((w.log_abs - l.log_abs).abs() / 30.0);
            }
        }
        Ok((worst < 1e-8, format!("max err {worst:.2e}")))
    }));

    out.push(run("toeplitz: moment identity has an exact 1/N defect", || {
        let s = limacon();
        let mut worst: f64 = 0.0;
        for k in 1..=3 {
            for &z in &[C64::new(0.0, 0.0), C64::new(1.0, 1.0)] {
                let rhs = moment_rhs(&s, z, k).map_err(|e| e.to_string())?;
                let scaled = |n: usize| -> Result<f64, String> {
                    let lhs = moment_lhs(&s, z, k, n).map_err(|e| e.to_string())?;
                    Ok(n as f64 * (lhs - rhs))
                };
                let (c1, c2) = (scaled(100)?, scaled(200)?);
                worst = worst.max((c1 - c2).abs() / c1.abs().max(1.0));
            }
        }
        Ok((
            worst < 1e-9,
            format!("N(lhs - rhs) varies by {worst:.2e} between N=100 and N=200"),
        ))
    }));

    out.push(run("symbol: region spot values", || {
        let s = limacon();
        let got: Vec<Option<usize>> = [-0.1, 1.0, 3.0]
            .iter()
            .map(|&x| match s.classify_region(C64::new(x, 0.0)) {
                Ok(RegionLabel::Interior { d0, .. }) => Some(d0),
                _ => None,
            })
            .collect();
        Ok((got == [Some(0), Some(1), Some(2)], format!("d0 = {got:?}")))
    }));

    out.push(run("symbol: log-potential scale covariance", || {
        let s = limacon();
        let c = C64::new(-1.5, 2.0);
        let sc = s.scaled(c).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for &z in &[C64::new(3.0, 0.0), C64::new(1.0, 0.5), C64::new(-0.1, 0.0)] {
            let a = s.limit_logpot(z).map_err(|e| e.to_string())?;
            let b = sc.limit_logpot(c * z).map_err(|e| e.to_string())?;
            worst = worst.max((b - a - c.norm().ln()).abs());
        }
        Ok((worst < 1e-10, format!("max err {worst:.2e}")))
    }));

    out.push(run("replacement: Stieltjes difference bound", || {
        let n = 30;
        let c = gaussian(n, 11);
        let d = c
            .add(&gaussian(n, 12).scaled(C64::new(0.1, 0.0)))
            .map_err(|e| e.to_string())?;
        let sc = singular_values(&c).map_err(|e| e.to_string())?;
        let sd = singular_values(&d).map_err(|e| e.to_string())?;
        let hs = c.sub(&d).map_err(|e| e.to_string())?.hs_norm();
        let mut worst: f64 = 0.0;
        for &im in &[0.5, 1.0, 2.0] {
            for i in 0..21 {
                let xi = C64::new(-3.0 + 0.5 * i as f64, im);
                let diff = (stieltjes_from_singular_values(&sc, xi).map_err(|e| e.to_string())?
                    - stieltjes_from_singular_values(&sd, xi).map_err(|e| e.to_string())?)
                .norm();
                worst = worst.max(diff / stieltjes_bound(hs, n, im));
            }
        }
        Ok((worst <= 1.0, format!("max diff/bound {worst:.3}")))
    }));

    out.push(run("replacement: interval mass brackets", || {
        let r = interval_mass_check(&[1.0], 0.5, 1.5, 0.01, 0.1).map_err(|e| e.to_string())?;
        let ok = r.lower <= r.mass && r.mass <= r.upper && r.mass == 0.5;
        Ok((ok, format!("{:.4} <= {:.4} <= {:.4}", r.lower, r.mass, r.upper)))
    }));

    out.push(run("anti-concentration: frequency below bound", || {
        let rows =
            run_anti_conc(&anti_conc_test_polynomial(), &[1e-3, 1e-2, 1e-1], 20_000, 4).map_err(|e| e.to_string())?;
        let ok = rows.iter().all(|r| r.frequency <= r.bound);
        let detail = rows
            .iter()
            .map(|r| format!("eps={:.0e}: {:.4} <= {:.2}", r.eps, r.frequency, r.bound))
            .collect::<Vec<_>>()
            .join(", ");
        Ok((ok, detail))
    }));

    out
}
