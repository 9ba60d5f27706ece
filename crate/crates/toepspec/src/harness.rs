//! End-to-end experiments. Every `(N, trial)` cell is a pure function of
//! its derived seed; cells run on the rayon pool and are collected in
//! input order, so artifacts do not depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;
use toepspec_core::expansion::{anti_conc_experiment, dominance_report, AntiConcRow, MultilinearPoly};
use toepspec_core::linalg::{eigenvalues, hs_norm, lu_logdet, singular_values, stieltjes_from_singular_values};
use toepspec_core::noise::{corner_delta, NoiseModel};
use toepspec_core::rng::derive_seed;
use toepspec_core::stats::{energy_distance_with, ks_distance, mean_self_distance, median};
use toepspec_core::toeplitz::{build, build_z};
use toepspec_core::{Error, RegionLabel, Symbol, C64};

use crate::config::{grid_nodes, Experiment};
use crate::error::{AppError, AppResult};

pub const THREADS_ENV: &str = "TOEPSPEC_THREADS";
/// Seed tag for the `μ_a` reference sample.
const MU_TAG: u64 = u64::MAX;
pub const STIELTJES_IM: [f64; 3] = [0.5, 1.0, 2.0];
pub const STIELTJES_RE_POINTS: usize = 21;

/// Sizes the global pool from `TOEPSPEC_THREADS` (default: logical cores).
/// Returns the thread count in effect.
pub fn configure_threads() -> AppResult<usize> {
    let requested = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| AppError::config(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
        Err(_) => 0,
    };
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(requested).build_global();
    Ok(rayon::current_num_threads())
}

pub fn cell_seed(base: u64, n: usize, trial: usize) -> u64 {
    derive_seed(base, &[n as u64, trial as u64])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsdTrial {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub converged: bool,
    pub eigenvalues: Vec<C64>,
    pub energy_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsdSummary {
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub median_energy_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsdArtifact {
    pub config_hash: String,
    pub mu_seed: u64,
    pub trials: Vec<EsdTrial>,
    pub summary: Vec<EsdSummary>,
}

/// Eigenvalues of `T_N + N^{-γ} E_N` per `(N, trial)` and their energy
/// distance to a `μ_a` sample. Eigensolver failures are recorded, not fatal.
pub fn run_esd(exp: &Experiment) -> AppResult<EsdArtifact> {
    let cfg = &exp.config;
    let mu_seed = derive_seed(cfg.seed, &[MU_TAG]);
    let mu = exp.symbol.sample_mu_a(cfg.mu_samples, mu_seed)?.points;
    let mu_self = mean_self_distance(&mu)?;
    let cells: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let trials = cells
        .par_iter()
        .map(|&(n, trial)| {
            let seed = cell_seed(cfg.seed, n, trial);
            let m = build(&exp.symbol, n).add(&exp.noise.perturbation(&exp.symbol, n, seed)?)?;
            let (converged, eigenvalues) = match eigenvalues(&m) {
                Ok(r) => (r.converged, r.eigenvalues),
                Err(Error::EigenNotConverged) => (false, Vec::new()),
                Err(e) => return Err(e),
            };
            let energy_distance = if converged {
                Some(energy_distance_with(&eigenvalues, &mu, mu_self)?)
            } else {
                None
            };
            Ok(EsdTrial {
                n,
                trial,
                seed,
                converged,
                eigenvalues,
                energy_distance,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let summary = cfg
        .sizes
        .iter()
        .map(|&n| {
            let cell: Vec<&EsdTrial> = trials.iter().filter(|t| t.n == n).collect();
            let d: Vec<f64> = cell.iter().filter_map(|t| t.energy_distance).collect();
            EsdSummary {
                n,
                trials: cell.len(),
                failures: cell.len() - d.len(),
                median_energy_distance: median(&d),
            }
        })
        .collect();
    Ok(EsdArtifact {
        config_hash: exp.hash.clone(),
        mu_seed,
        trials,
        summary,
    })
}

/// Index `ℓ` of the region `ℛ_ℓ` (`ℓ = d0`), or `None` on the boundary.
pub fn region_index(label: &RegionLabel) -> Option<usize> {
    match label {
        RegionLabel::Interior { d0, .. } => Some(*d0),
        RegionLabel::Boundary => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub rect: [f64; 4],
    pub res: usize,
    /// Row-major from `im_max` down, as in [`grid_nodes`].
    pub nodes: Vec<C64>,
    pub labels: Vec<RegionLabel>,
}

impl RegionMap {
    pub fn label_at(&self, row: usize, col: usize) -> RegionLabel {
        self.labels[row * self.res + col]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRecord {
    pub re: f64,
    pub im: f64,
    pub d0: Option<usize>,
    pub dd: Option<isize>,
    pub label: String,
}

/// Region label at every node; root-finder failures (double roots) are
/// labeled as boundary.
pub fn run_region_map(s: &Symbol, rect: [f64; 4], res: usize) -> AppResult<RegionMap> {
    if res < 2 {
        return Err(AppError::config("resolution must be >= 2"));
    }
    let nodes = grid_nodes(rect, res);
    let labels = nodes
        .par_iter()
        .map(|&z| s.classify_region(z).unwrap_or(RegionLabel::Boundary))
        .collect();
    Ok(RegionMap {
        rect,
        res,
        nodes,
        labels,
    })
}

pub fn region_records(map: &RegionMap) -> Vec<RegionRecord> {
    map.nodes
        .iter()
        .zip(&map.labels)
        .map(|(z, l)| {
            let (d0, dd, label) = match *l {
                RegionLabel::Interior { dd, d0 } => (Some(d0), Some(dd), format!("R{d0}")),
                RegionLabel::Boundary => (None, None, "BOUNDARY".to_string()),
            };
            RegionRecord {
                re: z.re,
                im: z.im,
                d0,
                dd,
                label,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogpotRow {
    pub z_re: f64,
    pub z_im: f64,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub perturbation: String,
    /// `(1/N) log|det(T_N(z) + perturbation)|`; empty for a singular matrix.
    pub value: Option<f64>,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogpotSummary {
    pub z_re: f64,
    pub z_im: f64,
    pub n: usize,
    pub limit: f64,
    pub median_value: Option<f64>,
    pub median_abs_error: Option<f64>,
    pub singular: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogpotTable {
    pub rows: Vec<LogpotRow>,
    pub summary: Vec<LogpotSummary>,
}

fn perturbation_name(m: &NoiseModel) -> String {
    crate::formats::NoiseJson::from_model(m).kind
}

/// Normalized log-determinants against `limit_logpot`. Boundary points are
/// rejected.
pub fn run_logpot(exp: &Experiment, z_list: &[C64]) -> AppResult<LogpotTable> {
    let cfg = &exp.config;
    let mut limits = Vec::with_capacity(z_list.len());
    for &z in z_list {
        if exp.symbol.classify_region(z)?.is_boundary() {
            return Err(AppError::Core(Error::Boundary));
        }
        limits.push(exp.symbol.limit_logpot(z)?);
    }
    let cells: Vec<(usize, usize, usize)> = (0..z_list.len())
        .flat_map(|zi| {
            cfg.sizes
                .iter()
                .flat_map(move |&n| (0..cfg.trials).map(move |t| (zi, n, t)))
        })
        .collect();
    let name = perturbation_name(&exp.noise);
    let rows = cells
        .par_iter()
        .map(|&(zi, n, trial)| {
            let z = z_list[zi];
            let seed = cell_seed(cfg.seed, n, trial);
            let m = build_z(&exp.symbol, z, n).add(&exp.noise.perturbation(&exp.symbol, n, seed)?)?;
            let ld = lu_logdet(&m)?;
            Ok(LogpotRow {
                z_re: z.re,
                z_im: z.im,
                n,
                trial,
                seed,
                perturbation: name.clone(),
                value: (!ld.singular).then(|| ld.log_abs / n as f64),
                limit: limits[zi],
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut summary = Vec::new();
    for (zi, &z) in z_list.iter().enumerate() {
        for &n in &cfg.sizes {
            let cell: Vec<&LogpotRow> = rows
                .iter()
                .filter(|r| r.n == n && r.z_re == z.re && r.z_im == z.im)
                .collect();
            let values: Vec<f64> = cell.iter().filter_map(|r| r.value).collect();
            let errors: Vec<f64> = values.iter().map(|v| (v - limits[zi]).abs()).collect();
            summary.push(LogpotSummary {
                z_re: z.re,
                z_im: z.im,
                n,
                limit: limits[zi],
                median_value: median(&values),
                median_abs_error: median(&errors),
                singular: cell.len() - values.len(),
            });
        }
    }
    Ok(LogpotTable { rows, summary })
}

/// Right-hand side of the Stieltjes difference bound,
/// `‖C - D‖_HS / (√N (Im ξ)^2)`.
pub fn stieltjes_bound(hs_diff: f64, n: usize, im: f64) -> f64 {
    hs_diff / ((n as f64).sqrt() * im * im)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StieltjesPoint {
    pub trial: usize,
    pub xi_re: f64,
    pub xi_im: f64,
    pub diff: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplacementTrial {
    pub trial: usize,
    pub seed: u64,
    pub ks: f64,
    pub hs_a: f64,
    pub hs_b: f64,
    pub hs_diff: f64,
    pub max_diff_over_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplacementRecord {
    pub z: C64,
    pub n: usize,
    pub trials: Vec<ReplacementTrial>,
    pub stieltjes: Vec<StieltjesPoint>,
    pub median_ks: f64,
    pub bound_violations: usize,
}

/// Singular values of `T_N(z) + perturbation` under two ensembles drawn
/// with the same per-trial seed, their KS distance, and the Stieltjes
/// difference against its bound on the `ξ` grid.
pub fn run_replacement(
    s: &Symbol,
    z: C64,
    n: usize,
    model_a: &NoiseModel,
    model_b: &NoiseModel,
    trials: usize,
    seed: u64,
) -> AppResult<ReplacementRecord> {
    if trials == 0 || n == 0 {
        return Err(AppError::config("replacement needs trials >= 1 and N >= 1"));
    }
    let base = build_z(s, z, n);
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed_t = cell_seed(seed, n, t);
            let c = base.add(&model_a.perturbation(s, n, seed_t)?)?;
            let d = base.add(&model_b.perturbation(s, n, seed_t)?)?;
            let sa = singular_values(&c)?;
            let sb = singular_values(&d)?;
            let hs_diff = hs_norm(&c.sub(&d)?);
            let ks = ks_distance(&sa, &sb)?;
            let top = sa[0].max(sb[0]);
            let bottom = sa[n - 1].min(sb[n - 1]);
            let mut points = Vec::with_capacity(STIELTJES_IM.len() * STIELTJES_RE_POINTS);
            for &im in &STIELTJES_IM {
                for i in 0..STIELTJES_RE_POINTS {
                    let re = bottom + (top - bottom) * i as f64 / (STIELTJES_RE_POINTS - 1) as f64;
                    let xi = C64::new(re, im);
                    let diff =
                        (stieltjes_from_singular_values(&sa, xi)? - stieltjes_from_singular_values(&sb, xi)?).norm();
                    points.push(StieltjesPoint {
                        trial: t,
                        xi_re: re,
                        xi_im: im,
                        diff,
                        bound: stieltjes_bound(hs_diff, n, im),
                    });
                }
            }
            let max_ratio = points
                .iter()
                .map(|p| if p.diff == 0.0 { 0.0 } else { p.diff / p.bound })
                .fold(0.0, f64::max);
            let trial = ReplacementTrial {
                trial: t,
                seed: seed_t,
                ks,
                hs_a: hs_norm(&c),
                hs_b: hs_norm(&d),
                hs_diff,
                max_diff_over_bound: max_ratio,
            };
            Ok((trial, points))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let (trials, points): (Vec<_>, Vec<_>) = per_trial.into_iter().unzip();
    let stieltjes: Vec<StieltjesPoint> = points.into_iter().flatten().collect();
    let ks: Vec<f64> = trials.iter().map(|t| t.ks).collect();
    Ok(ReplacementRecord {
        z,
        n,
        median_ks: median(&ks).expect("trials >= 1"),
        bound_violations: stieltjes.iter().filter(|p| p.diff > p.bound).count(),
        trials,
        stieltjes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalMass {
    pub mass: f64,
    pub upper: f64,
    pub lower: f64,
}

/// `-Im G(x + iτ) / π` for the symmetrized measure `(1/2n) Σ (δ_s + δ_{-s})`.
fn poisson_density(samples: &[f64], x: f64, tau: f64) -> f64 {
    let sum: f64 = samples
        .iter()
        .map(|&s| tau / ((x - s).powi(2) + tau * tau) + tau / ((x + s).powi(2) + tau * tau))
        .sum();
    sum / (2.0 * samples.len() as f64 * std::f64::consts::PI)
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson on panels no wider than `panel`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panel: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let pieces = ((b - a) / panel).ceil().clamp(1.0, 1e6) as usize;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = lo + h;
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = h / 6.0 * (fa + 4.0 * fm + fb);
            simpson(&f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// Mass of `[a, b]` under the symmetrized measure of `samples`, bracketed
/// by the Poisson-smoothed integrals over `[a ∓ ϱ, b ± ϱ]` `± τ/ϱ`.
pub fn interval_mass_check(samples: &[f64], a: f64, b: f64, tau: f64, rho: f64) -> AppResult<IntervalMass> {
    if samples.is_empty() {
        return Err(AppError::Core(Error::Empty));
    }
    if !(rho > 0.0 && tau > 0.0 && b - a > rho) {
        return Err(AppError::config("interval check needs b - a > ϱ > 0 and τ > 0"));
    }
    let inside = samples
        .iter()
        .map(|&s| usize::from(a <= s && s <= b) + usize::from(a <= -s && -s <= b))
        .sum::<usize>();
    let mass = inside as f64 / (2 * samples.len()) as f64;
    let f = |x: f64| poisson_density(samples, x, tau);
    let tol = 1e-10;
    let upper = integrate(f, a - rho, b + rho, tau, tol) + tau / rho;
    let lower = integrate(f, a + rho, b - rho, tau, tol) - tau / rho;
    Ok(IntervalMass { mass, upper, lower })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceDraw {
    pub z_re: f64,
    pub z_im: f64,
    pub n: usize,
    pub draw: usize,
    pub seed: u64,
    pub dd: isize,
    pub d0: usize,
    /// `|P_0|, …, |P_d|`.
    pub abs_p: Vec<f64>,
    pub log_normalizer: f64,
    pub normalized_pd: f64,
    pub ratio_above: f64,
    pub ratio_below: f64,
}

/// Corner-expansion diagnostics over `draws` corner perturbations per
/// `(z, N)`; draw `t` at size `N` uses the same `Δ_N` for every `z`.
pub fn run_dominance(
    s: &Symbol,
    z_list: &[C64],
    sizes: &[usize],
    draws: usize,
    gamma_star: f64,
    seed: u64,
) -> AppResult<Vec<DominanceDraw>> {
    let cells: Vec<(C64, usize, usize)> = z_list
        .iter()
        .flat_map(|&z| sizes.iter().flat_map(move |&n| (0..draws).map(move |t| (z, n, t))))
        .collect();
    let out = cells
        .par_iter()
        .map(|&(z, n, draw)| {
            let seed = cell_seed(seed, n, draw);
            let delta = corner_delta(s, n, gamma_star, seed)?;
            let r = dominance_report(s, z, &delta)?;
            Ok(DominanceDraw {
                z_re: z.re,
                z_im: z.im,
                n,
                draw,
                seed,
                dd: r.dd,
                d0: r.d0,
                abs_p: r.p.iter().map(|p| p.norm()).collect(),
                log_normalizer: r.log_normalizer,
                normalized_pd: r.normalized_pd,
                ratio_above: r.ratio_above,
                ratio_below: r.ratio_below,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(out)
}

/// Writes dominance draws with one `abs_P_k` column per expansion degree.
pub fn write_dominance_csv(path: &std::path::Path, draws: &[DominanceDraw]) -> AppResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let d = draws.first().map_or(0, |r| r.abs_p.len());
    let mut header: Vec<String> = ["z_re", "z_im", "N", "draw", "seed", "frak_d", "d0"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..d).map(|k| format!("abs_P_{k}")));
    header.extend(
        [
            "log_normalizer",
            "abs_P_frak_d_over_normalizer",
            "abs_sum_P_above_over_abs_P_frak_d",
            "sum_abs_P_below_over_normalizer",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    w.write_record(&header)?;
    for r in draws {
        let mut row = vec![
            r.z_re.to_string(),
            r.z_im.to_string(),
            r.n.to_string(),
            r.draw.to_string(),
            r.seed.to_string(),
            r.dd.to_string(),
            r.d0.to_string(),
        ];
        row.extend(r.abs_p.iter().map(|v| v.to_string()));
        row.extend(
            [r.log_normalizer, r.normalized_pd, r.ratio_above, r.ratio_below]
                .iter()
                .map(|v| v.to_string()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiConcRecord {
    pub eps: f64,
    pub hits: usize,
    pub trials: usize,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub bound: f64,
}

impl From<&AntiConcRow> for AntiConcRecord {
    fn from(r: &AntiConcRow) -> Self {
        Self {
            eps: r.eps,
            hits: r.hits,
            trials: r.trials,
            frequency: r.frequency,
            wilson_low: r.wilson_low,
            wilson_high: r.wilson_high,
            bound: r.bound,
        }
    }
}

/// `U_1 U_2 - U_3 U_4`, the degree-2 test polynomial with `c* = 1`.
pub fn anti_conc_test_polynomial() -> MultilinearPoly {
    let one = C64::new(1.0, 0.0);
    MultilinearPoly::new(4, 2, vec![(vec![0, 1], one), (vec![2, 3], -one)]).expect("valid polynomial")
}

pub fn run_anti_conc(
    poly: &MultilinearPoly,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
) -> AppResult<Vec<AntiConcRecord>> {
    Ok(anti_conc_experiment(poly, eps_grid, trials, seed)?
        .iter()
        .map(AntiConcRecord::from)
        .collect())
}
