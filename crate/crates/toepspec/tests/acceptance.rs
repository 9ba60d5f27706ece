//! Acceptance criteria, one PASS/FAIL line each. Oracles are computed here
//! independently of the library paths they check.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use toepspec::config::ExperimentConfig;
use toepspec::formats::NoiseJson;
use toepspec::harness::{
    configure_threads, region_index, run_anti_conc, run_dominance, run_esd, run_logpot, run_region_map, run_replacement,
};
use toepspec::validate::{limacon, tridiagonal};
use toepspec_core::expansion::{bidiag_subdet, combinations, complement, det_sum_decomposition};
use toepspec_core::linalg::{eigenvalues, lu_logdet};
use toepspec_core::noise::{smin_tail_check, NoiseKind, NoiseModel};
use toepspec_core::rng::{complex_normal, stream};
use toepspec_core::stats::{median, ols_slope};
use toepspec_core::toeplitz::{build, build_z, moment_lhs, widom_sum};
use toepspec_core::{ComplexMatrix, RegionLabel, Symbol, C64};

use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Leibniz expansion; fine up to N = 6.
fn leibniz_det(m: &ComplexMatrix) -> C64 {
    let n = m.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = C64::new(0.0, 0.0);
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(p: &mut Vec<usize>, k: usize, m: &ComplexMatrix, total: &mut C64) {
    let n = p.len();
    if k == n {
        let mut inv = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        let prod: C64 = (0..n).map(|i| m[(i, p[i])]).product();
        *total += if inv % 2 == 0 { prod } else { -prod };
        return;
    }
    for i in k..n {
        p.swap(k, i);
        permute(p, k + 1, m, total);
        p.swap(k, i);
    }
}

fn gaussian(n: usize, seed: u64) -> ComplexMatrix {
    let mut g = stream(seed, 0);
    ComplexMatrix::from_fn(n, n, |_, _| complex_normal(&mut g))
}

fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    let items: Vec<usize> = (0..n).collect();
    (0..=n).flat_map(|k| combinations(&items, k)).collect()
}

fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn c1_kernel() -> Outcome {
    let n = 100;
    let ev = eigenvalues(&build(&tridiagonal(), n)).expect("eigenvalues");
    let mut got: Vec<f64> = ev.eigenvalues.iter().map(|z| z.re).collect();
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = (1..=n).map(|k| 2.0 * (k as f64 * PI / 101.0).cos()).collect();
    want.sort_by(f64::total_cmp);
    let im = ev.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(im, f64::max);
    outcome(err < 1e-8, format!("max |λ - 2cos(kπ/101)| = {err:.2e}"))
}

fn c2_expansion() -> Outcome {
    let mut worst: f64 = 0.0;
    // every (X, Y) pair is enumerated by a dense B; all support patterns for N <= 3
    for n in 1..=5 {
        for seed in 0..4 {
            let a = gaussian(n, 10 * n as u64 + seed);
            let b = gaussian(n, 1000 + 10 * n as u64 + seed);
            let want = leibniz_det(&a.add(&b).unwrap());
            worst = worst.max(rel_err(det_sum_decomposition(&a, &b).unwrap(), want));
        }
    }
    for n in 1..=3 {
        let a = gaussian(n, 7 + n as u64);
        let full = gaussian(n, 70 + n as u64);
        for mask in 0u32..(1 << (n * n)) {
            let b = ComplexMatrix::from_fn(n, n, |i, j| {
                if mask >> (i * n + j) & 1 == 1 {
                    full[(i, j)]
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let want = leibniz_det(&a.add(&b).unwrap());
            worst = worst.max(rel_err(det_sum_decomposition(&a, &b).unwrap(), want));
        }
    }
    for n in 1..=5 {
        for zeta in [C64::new(0.7, 0.3), C64::new(-1.2, 0.0), C64::new(0.0, 0.0)] {
            let mut jb = ComplexMatrix::jordan(n);
            jb.shift_diagonal(zeta);
            let subsets = all_subsets(n);
            for x in &subsets {
                for y in subsets.iter().filter(|y| y.len() == x.len()) {
                    let dense = if x.len() == n {
                        C64::new(1.0, 0.0)
                    } else {
                        leibniz_det(&jb.select(&complement(x, n), &complement(y, n)))
                    };
                    let closed = bidiag_subdet(zeta, x, y, n).unwrap();
                    let err = if dense.norm() == 0.0 {
                        closed.norm()
                    } else {
                        rel_err(closed, dense)
                    };
                    worst = worst.max(err);
                }
            }
        }
    }
    let mut g = stream(2024, 0);
    for case in 0..200u64 {
        let n = 1 + (case % 6) as usize;
        let a = gaussian(n, 5000 + case);
        let sparse = case % 2 == 0;
        let b = ComplexMatrix::from_fn(n, n, |_, _| {
            let v = complex_normal(&mut g);
            if sparse && g.random::<f64>() < 0.7 {
                C64::new(0.0, 0.0)
            } else {
                v
            }
        });
        let want = leibniz_det(&a.add(&b).unwrap());
        worst = worst.max(rel_err(det_sum_decomposition(&a, &b).unwrap(), want));
    }
    outcome(worst < 1e-9, format!("max relative error {worst:.2e}"))
}

fn random_interior_z(s: &Symbol, g: &mut impl Rng) -> C64 {
    loop {
        let z = C64::new(g.random_range(-3.0..3.0), g.random_range(-3.0..3.0));
        if let Ok(p) = s.root_profile(z) {
            if !p.boundary && !p.near_double && p.min_separation > 1e-3 {
                return z;
            }
        }
    }
}

fn c3_widom() -> Outcome {
    let n = 30;
    let mut worst: f64 = 0.0;
    let mut g = stream(33, 0);
    for s in [limacon(), tridiagonal()] {
        for _ in 0..20 {
            let z = random_interior_z(&s, &mut g);
            let w = widom_sum(&s, z, n).unwrap();
            let l = lu_logdet(&build_z(&s, z, n)).unwrap();
            worst = worst.max((w.log_abs - l.log_abs).abs() / n as f64);
        }
    }
    outcome(
        worst < 1e-8,
        format!("max |Δ log|det|| / N = {worst:.2e} over 40 points"),
    )
}

/// `E|z - a(U)|^{2k}` as the constant term of `(b(λ) conj(b)(1/λ))^k`.
fn moment_oracle(s: &Symbol, z: C64, k: usize) -> f64 {
    let d2 = s.d2() as isize;
    let d = s.degree();
    // b_j for j = -d2..=d1 at index j + d2
    let b: Vec<C64> = (0..=d)
        .map(|i| {
            let j = i as isize - d2;
            if j == 0 {
                z - s.coeff(0)
            } else {
                -s.coeff(j)
            }
        })
        .collect();
    // |b|^2 has offsets -d..=d at index m + d
    let mut sq = vec![C64::new(0.0, 0.0); 2 * d + 1];
    for (i, bi) in b.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            sq[i + d - j] += bi * bj.conj();
        }
    }
    let mut acc = vec![C64::new(1.0, 0.0)];
    for _ in 0..k {
        let mut next = vec![C64::new(0.0, 0.0); acc.len() + 2 * d];
        for (i, x) in acc.iter().enumerate() {
            for (j, y) in sq.iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    acc[k * d].re
}

fn c4_moments() -> Outcome {
    let s = limacon();
    let n = 1000;
    let mut parts = Vec::new();
    let mut ok = true;
    for &z in &[C64::new(0.0, 0.0), C64::new(1.0, 1.0)] {
        for k in 1..=3 {
            let lhs = moment_lhs(&s, z, k, n).unwrap();
            let rhs = moment_oracle(&s, z, k);
            let err = (lhs - rhs).abs();
            let tol = 10.0 * k as f64 * s.degree() as f64 / n as f64;
            let pass = err < tol;
            ok &= pass;
            if !pass {
                parts.push(format!(
                    "z={z} k={k}: |lhs-rhs|={err:.4} >= {tol:.3} (N|lhs-rhs|={:.1})",
                    err * n as f64
                ));
            }
        }
    }
    let detail = if parts.is_empty() {
        "all six (k, z) within 10kd/N".to_string()
    } else {
        parts.join("; ")
    };
    outcome(ok, detail)
}

/// `d0` from the eigenvalues of the companion matrix of `P_z`.
fn companion_d0(s: &Symbol, z: C64) -> usize {
    let p = s.char_poly(z);
    let d = p.len() - 1;
    let lead = p[d];
    let comp = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            -p[d - 1 - j] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    eigenvalues(&comp)
        .unwrap()
        .eigenvalues
        .iter()
        .filter(|r| r.norm() >= 1.0)
        .count()
}

fn c5_regions() -> Outcome {
    let s = limacon();
    let map = run_region_map(&s, [-2.5, 3.5, -3.0, 3.0], 200).unwrap();
    let mut seen: Vec<usize> = map.labels.iter().filter_map(region_index).collect();
    seen.sort_unstable();
    seen.dedup();
    let spot: Vec<Option<usize>> = [-0.1, 1.0, 3.0]
        .iter()
        .map(|&x| region_index(&s.classify_region(C64::new(x, 0.0)).unwrap()))
        .collect();
    let mut g = stream(55, 0);
    let (mut agree, mut checked) = (0, 0);
    for _ in 0..500 {
        let idx = g.random_range(0..map.labels.len());
        if let RegionLabel::Interior { d0, .. } = map.labels[idx] {
            checked += 1;
            if companion_d0(&s, map.nodes[idx]) == d0 {
                agree += 1;
            }
        }
    }
    let ok = seen == [0, 1, 2] && spot == [Some(0), Some(1), Some(2)] && agree == checked;
    outcome(
        ok,
        format!("regions {seen:?}, spots {spot:?}, companion agreement {agree}/{checked}"),
    )
}

fn esd_config(kind: &str) -> ExperimentConfig {
    ExperimentConfig {
        noise: NoiseJson::new(kind, 0.75),
        ..ExperimentConfig::default()
    }
}

fn c6_esd() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in ["gaussian_complex", "rademacher"] {
        let exp = esd_config(kind).validate().unwrap();
        let art = run_esd(&exp).unwrap();
        let med: Vec<f64> = art
            .summary
            .iter()
            .map(|s| s.median_energy_distance.unwrap_or(f64::INFINITY))
            .collect();
        let pass = med.windows(2).all(|w| w[1] < w[0]) && med[2] < 0.08;
        ok &= pass;
        parts.push(format!("{kind}: medians {:.5}/{:.5}/{:.5}", med[0], med[1], med[2]));
    }
    outcome(ok, parts.join("; "))
}

fn c7_logpot() -> Outcome {
    let s = limacon();
    let points = [(3.0, 3f64.ln()), (1.0, 0.48121), (-0.1, 0.0)];
    let mut ok = true;
    let mut parts = Vec::new();
    for &(x, stated) in &points {
        let lim = s.limit_logpot(C64::new(x, 0.0)).unwrap();
        if (lim - stated).abs() > 1e-5 {
            ok = false;
            parts.push(format!("limit at {x} is {lim}, expected {stated}"));
        }
    }
    let z: Vec<C64> = points.iter().map(|p| C64::new(p.0, 0.0)).collect();
    for noise in [
        NoiseJson::new("gaussian_complex", 0.75),
        NoiseJson::corner(s.degree() as f64 + 1.0),
    ] {
        let cfg = ExperimentConfig {
            sizes: vec![500],
            noise: noise.clone(),
            ..ExperimentConfig::default()
        };
        let table = run_logpot(&cfg.validate().unwrap(), &z).unwrap();
        for (row, &(x, stated)) in table.summary.iter().zip(&points) {
            let values: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.z_re == row.z_re)
                .map(|r| r.value.map_or(f64::INFINITY, |v| (v - stated).abs()))
                .collect();
            let err = median(&values).unwrap();
            let pass = err < 0.05;
            ok &= pass;
            parts.push(format!(
                "{} z={x}: {err:.4}{}",
                noise.kind,
                if pass { "" } else { " FAIL" }
            ));
        }
    }
    outcome(ok, parts.join(", "))
}

fn c8_dominance() -> Outcome {
    let s = limacon();
    let sizes = [10, 20, 40];
    let gamma_star = s.degree() as f64 + 1.0;
    let z = [C64::new(3.0, 0.0), C64::new(-0.1, 0.0), C64::new(1.0, 0.0)];
    let rows = run_dominance(&s, &z, &sizes, 100, gamma_star, 8).unwrap();
    let cell = |x: f64, n: usize| rows.iter().filter(move |r| r.z_re == x && r.n == n);

    let above: Vec<f64> = sizes
        .iter()
        .map(|&n| median(&cell(3.0, n).map(|r| r.ratio_above).collect::<Vec<_>>()).unwrap())
        .collect();
    let outer = above.windows(2).all(|w| w[1] < w[0]);

    let below: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            median(&cell(-0.1, n).map(|r| r.ratio_below).collect::<Vec<_>>())
                .unwrap()
                .ln()
        })
        .collect();
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let rate = ols_slope(&xs, &below).unwrap();
    let inner = rate < 0.0;

    let hits: Vec<usize> = sizes
        .iter()
        .map(|&n| {
            let floor = (n as f64).powf(-gamma_star - 1.0);
            cell(1.0, n).filter(|r| r.normalized_pd >= floor).count()
        })
        .collect();
    let middle = hits.iter().all(|&h| h >= 95);

    outcome(
        outer && inner && middle,
        format!(
            "z=3 median |ΣP_k/P_0| {:.2e}/{:.2e}/{:.2e}; z=-0.1 rate {rate:.3}; z=1 hits {hits:?}",
            above[0], above[1], above[2]
        ),
    )
}

fn c9_anti_conc() -> Outcome {
    let poly = toepspec::harness::anti_conc_test_polynomial();
    let rows = run_anti_conc(&poly, &[1e-3, 1e-2, 1e-1], 100_000, 9).unwrap();
    let e = std::f64::consts::E;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &rows {
        let bound = (8.0 * e).powi(2) * r.eps * (1.0 / r.eps).ln();
        ok &= r.frequency <= bound && (r.bound - bound).abs() <= 1e-9 * bound;
        parts.push(format!("ε={:.0e}: {:.5} ≤ {:.3}", r.eps, r.frequency, bound));
    }
    outcome(ok, parts.join(", "))
}

fn c10_replacement() -> Outcome {
    let s = limacon();
    let n = 300;
    let z = C64::new(1.0, 0.0);
    let a = NoiseModel::new(NoiseKind::GaussianComplex, 0.75).unwrap();
    let b = NoiseModel::new(NoiseKind::Rademacher, 0.75).unwrap();
    let rec = run_replacement(&s, z, n, &a, &b, 10, 10).unwrap();
    let shift = build_z(&s, z, n).scaled(C64::new((n as f64).powf(0.75), 0.0));
    let tail = smin_tail_check(&a, &shift, 200, 10).unwrap();
    let below = tail.smins.iter().filter(|&&x| x < (n as f64).powi(-4)).count();
    let ok = rec.median_ks < 0.1 && rec.bound_violations == 0 && below == 0;
    outcome(
        ok,
        format!(
            "median KS {:.4}, Stieltjes violations {}/{}, s_min < N^-4 in {below}/200 (min {:.2e})",
            rec.median_ks,
            rec.bound_violations,
            rec.stieltjes.len(),
            tail.smins.iter().cloned().fold(f64::INFINITY, f64::min)
        ),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let threads = configure_threads().expect("thread configuration");
    println!("acceptance: {threads} thread(s)");
    let criteria: [Criterion; 10] = [
        (
            "1 kernel: tridiagonal Toeplitz spectrum",
            Duration::from_secs(1),
            c1_kernel,
        ),
        (
            "2 determinant expansion identities",
            Duration::from_secs(10),
            c2_expansion,
        ),
        ("3 Widom sum vs LU", Duration::from_secs(5), c3_widom),
        ("4 moment identity", Duration::from_secs(30), c4_moments),
        ("5 region map", Duration::from_secs(30), c5_regions),
        ("6 ESD convergence", Duration::from_secs(600), c6_esd),
        ("7 log-potential convergence", Duration::from_secs(300), c7_logpot),
        ("8 corner expansion dominance", Duration::from_secs(300), c8_dominance),
        ("9 anti-concentration", Duration::from_secs(60), c9_anti_conc),
        ("10 replacement diagnostics", Duration::from_secs(300), c10_replacement),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let t = Instant::now();
        let o = f();
        let dt = t.elapsed();
        let passed = o.passed && dt < budget;
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {name}: {} ({}; {:.2}s of {}s)",
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
