use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use toepspec::config::{Experiment, ExperimentConfig};
use toepspec::error::{AppError, AppResult};
use toepspec::formats::{write_records, NoiseJson, RecordFormat, SymbolJson};
use toepspec::harness::{self, region_index, THREADS_ENV};
use toepspec::{svg, validate};
use toepspec_core::expansion::MAX_CORNER_SIZE;
use toepspec_core::stats::median;
use toepspec_core::{Error, C64};

#[derive(Parser)]
#[command(
    name = "toepspec",
    version,
    about = "Spectra of randomly perturbed banded Toeplitz matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue clouds and energy distance to the symbol-curve law.
    Spectrum(Common),
    /// Region map of the plane by root counts (CSV + SVG).
    Regions(Common),
    /// Normalized log-determinants against the limiting log-potential.
    Logpot(Common),
    /// Singular-value comparison of two noise ensembles.
    Replace(Common),
    /// Corner-perturbation determinant expansion diagnostics.
    Expand {
        #[command(flatten)]
        common: Common,
        /// Corner draws per (z, N).
        #[arg(long, default_value_t = 100)]
        draws: usize,
        /// Corner exponent; defaults to d + 1.
        #[arg(long)]
        gamma_star: Option<f64>,
    },
    /// Exact identities and kernel cross-checks.
    Validate,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Symbol as JSON, e.g. '{"d1":2,"d2":0,"coeffs":[[0,0],[1,0],[1,0]]}'.
    #[arg(long)]
    symbol: Option<String>,
    /// z rectangle re_min,re_max,im_min,im_max.
    #[arg(long, allow_hyphen_values = true)]
    rect: Option<String>,
    /// Grid resolution per axis.
    #[arg(long)]
    res: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<RecordFormat>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Validate the config and print the plan without computing.
    #[arg(long)]
    dry_run: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted-path override, e.g. --set noise.kind=rademacher (repeatable).
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
}

fn parse_rect(s: &str) -> AppResult<[f64; 4]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| AppError::config(format!("--rect {s:?}: expected four numbers")))?;
    v.try_into()
        .map_err(|_| AppError::config(format!("--rect {s:?}: expected four numbers")))
}

fn load_experiment(common: &Common, base: ExperimentConfig) -> AppResult<Experiment> {
    let cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => base,
    };
    let mut cfg = cfg.with_overrides(&common.set)?;
    if let Some(s) = &common.symbol {
        cfg.symbol = serde_json::from_str::<SymbolJson>(s).map_err(|e| AppError::config(format!("--symbol: {e}")))?;
    }
    if let Some(r) = &common.rect {
        cfg.z_grid.rect = Some(parse_rect(r)?);
    }
    if let Some(res) = common.res {
        cfg.z_grid.res = Some(res);
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(f) = common.format {
        cfg.outputs.format = f;
    }
    if common.svg {
        cfg.outputs.svg = true;
    }
    if let Some(out) = &common.out {
        cfg.outputs.dir = out.clone();
    }
    cfg.validate()
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_hash: &'a str,
    config: &'a ExperimentConfig,
}

fn prepare_output(exp: &Experiment, command: &str) -> AppResult<PathBuf> {
    let dir = exp.config.outputs.dir.clone();
    std::fs::create_dir_all(&dir)?;
    let manifest = Manifest {
        command,
        config_hash: &exp.hash,
        config: &exp.config,
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(dir)
}

fn record_path(dir: &Path, stem: &str, format: RecordFormat) -> PathBuf {
    dir.join(format!("{stem}.{}", format.extension()))
}

fn print_plan(command: &str, exp: &Experiment, cells: usize) {
    let c = &exp.config;
    println!("command: {command}");
    println!("config_hash: {}", exp.hash);
    println!("symbol: d1={} d2={}", c.symbol.d1, c.symbol.d2);
    println!("sizes: {:?}  trials: {}  seed: {}", c.sizes, c.trials, c.seed);
    println!("cells: {cells}");
    println!("output: {} ({})", c.outputs.dir.display(), c.outputs.format.extension());
}

fn curve_points(exp: &Experiment, count: usize) -> AppResult<Vec<C64>> {
    (0..count)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            Ok(exp.symbol.eval(C64::from_polar(1.0, t))?)
        })
        .collect()
}

#[derive(Serialize)]
struct TrialRecord {
    n: usize,
    trial: usize,
    seed: u64,
    converged: bool,
    energy_distance: Option<f64>,
}

#[derive(Serialize)]
struct EigenRecord {
    n: usize,
    trial: usize,
    seed: u64,
    re: f64,
    im: f64,
}

fn cmd_spectrum(common: &Common) -> AppResult<bool> {
    let exp = load_experiment(common, ExperimentConfig::default())?;
    if common.dry_run {
        print_plan("spectrum", &exp, exp.config.sizes.len() * exp.config.trials);
        return Ok(true);
    }
    let dir = prepare_output(&exp, "spectrum")?;
    let art = harness::run_esd(&exp)?;
    let fmt = exp.config.outputs.format;
    let trials: Vec<TrialRecord> = art
        .trials
        .iter()
        .map(|t| TrialRecord {
            n: t.n,
            trial: t.trial,
            seed: t.seed,
            converged: t.converged,
            energy_distance: t.energy_distance,
        })
        .collect();
    write_records(&record_path(&dir, "esd_trials", fmt), fmt, &trials)?;
    let eigen: Vec<EigenRecord> = art
        .trials
        .iter()
        .flat_map(|t| {
            t.eigenvalues.iter().map(move |z| EigenRecord {
                n: t.n,
                trial: t.trial,
                seed: t.seed,
                re: z.re,
                im: z.im,
            })
        })
        .collect();
    write_records(&record_path(&dir, "eigenvalues", fmt), fmt, &eigen)?;
    write_records(&dir.join("esd_summary.csv"), RecordFormat::Csv, &art.summary)?;
    for s in &art.summary {
        println!(
            "N={} trials={} failures={} median_energy_distance={}",
            s.n,
            s.trials,
            s.failures,
            s.median_energy_distance.map_or("n/a".into(), |d| format!("{d:.6}"))
        );
    }
    if exp.config.outputs.svg {
        let curve = curve_points(&exp, 512)?;
        for &n in &exp.config.sizes {
            if let Some(t) = art.trials.iter().find(|t| t.n == n && t.converged) {
                let title = format!("eigenvalues, N={n}, trial {}", t.trial);
                std::fs::write(
                    dir.join(format!("esd_N{n}.svg")),
                    svg::scatter_svg(&t.eigenvalues, &curve, &title),
                )?;
            }
        }
    }
    Ok(art.summary.iter().all(|s| s.failures == 0))
}

fn regions_default() -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.z_grid.points = None;
    c
}

fn cmd_regions(common: &Common) -> AppResult<bool> {
    let exp = load_experiment(common, regions_default())?;
    let g = &exp.config.z_grid;
    let (rect, res) = match (g.rect, g.res) {
        (Some(r), Some(n)) => (r, n),
        _ => return Err(AppError::config("regions needs z_grid.rect and z_grid.res")),
    };
    if common.dry_run {
        print_plan("regions", &exp, res * res);
        return Ok(true);
    }
    let dir = prepare_output(&exp, "regions")?;
    let map = harness::run_region_map(&exp.symbol, rect, res)?;
    let fmt = exp.config.outputs.format;
    write_records(&record_path(&dir, "regions", fmt), fmt, &harness::region_records(&map))?;
    std::fs::write(dir.join("regions.svg"), svg::region_svg(&map, "regions by root count"))?;
    let mut counts = std::collections::BTreeMap::new();
    for l in &map.labels {
        *counts.entry(region_index(l)).or_insert(0usize) += 1;
    }
    let parts: Vec<String> = counts
        .iter()
        .map(|(k, v)| match k {
            Some(i) => format!("R{i}={v}"),
            None => format!("BOUNDARY={v}"),
        })
        .collect();
    println!("res={res} {}", parts.join(" "));
    Ok(true)
}

fn cmd_logpot(common: &Common) -> AppResult<bool> {
    let exp = load_experiment(common, ExperimentConfig::default())?;
    let z = exp.z_points();
    if common.dry_run {
        print_plan("logpot", &exp, z.len() * exp.config.sizes.len() * exp.config.trials);
        return Ok(true);
    }
    let table = harness::run_logpot(&exp, &z).map_err(|e| match e {
        AppError::Core(Error::Boundary) => AppError::config("z list contains a boundary point"),
        e => e,
    })?;
    let dir = prepare_output(&exp, "logpot")?;
    let fmt = exp.config.outputs.format;
    write_records(&record_path(&dir, "logpot", fmt), fmt, &table.rows)?;
    write_records(&dir.join("logpot_summary.csv"), RecordFormat::Csv, &table.summary)?;
    for s in &table.summary {
        println!(
            "z={}{:+}i N={} limit={:.6} median={} median_abs_error={} singular={}",
            s.z_re,
            s.z_im,
            s.n,
            s.limit,
            s.median_value.map_or("n/a".into(), |v| format!("{v:.6}")),
            s.median_abs_error.map_or("n/a".into(), |v| format!("{v:.6}")),
            s.singular
        );
    }
    Ok(true)
}

#[derive(Serialize)]
struct ReplaceRecord {
    z_re: f64,
    z_im: f64,
    n: usize,
    trial: usize,
    seed: u64,
    ks: f64,
    hs_a: f64,
    hs_b: f64,
    hs_diff: f64,
    max_diff_over_bound: f64,
}

#[derive(Serialize)]
struct StieltjesRecord {
    z_re: f64,
    z_im: f64,
    n: usize,
    trial: usize,
    xi_re: f64,
    xi_im: f64,
    abs_g_diff: f64,
    bound: f64,
}

fn cmd_replace(common: &Common) -> AppResult<bool> {
    let exp = load_experiment(common, ExperimentConfig::default())?;
    let model_b = match exp.noise_b {
        Some(m) => m,
        None => NoiseJson::new("rademacher", exp.config.gamma).to_model()?,
    };
    let z = exp.z_points();
    if common.dry_run {
        print_plan("replace", &exp, z.len() * exp.config.sizes.len() * exp.config.trials);
        return Ok(true);
    }
    let dir = prepare_output(&exp, "replace")?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut violations = 0;
    for &zz in &z {
        for &n in &exp.config.sizes {
            let r = harness::run_replacement(
                &exp.symbol,
                zz,
                n,
                &exp.noise,
                &model_b,
                exp.config.trials,
                exp.config.seed,
            )?;
            println!(
                "z={}{:+}i N={} median_ks={:.6} stieltjes_violations={}",
                zz.re, zz.im, n, r.median_ks, r.bound_violations
            );
            violations += r.bound_violations;
            rows.extend(r.trials.iter().map(|t| ReplaceRecord {
                z_re: zz.re,
                z_im: zz.im,
                n,
                trial: t.trial,
                seed: t.seed,
                ks: t.ks,
                hs_a: t.hs_a,
                hs_b: t.hs_b,
                hs_diff: t.hs_diff,
                max_diff_over_bound: t.max_diff_over_bound,
            }));
            points.extend(r.stieltjes.iter().map(|p| StieltjesRecord {
                z_re: zz.re,
                z_im: zz.im,
                n,
                trial: p.trial,
                xi_re: p.xi_re,
                xi_im: p.xi_im,
                abs_g_diff: p.diff,
                bound: p.bound,
            }));
        }
    }
    let fmt = exp.config.outputs.format;
    write_records(&record_path(&dir, "replacement", fmt), fmt, &rows)?;
    write_records(&record_path(&dir, "stieltjes", fmt), fmt, &points)?;
    Ok(violations == 0)
}

fn expand_default() -> ExperimentConfig {
    ExperimentConfig {
        sizes: vec![10, 20, 40],
        ..ExperimentConfig::default()
    }
}

fn cmd_expand(common: &Common, draws: usize, gamma_star: Option<f64>) -> AppResult<bool> {
    let exp = load_experiment(common, expand_default())?;
    if exp.config.sizes.iter().any(|&n| n > MAX_CORNER_SIZE) {
        return Err(AppError::config(format!("expand supports N <= {MAX_CORNER_SIZE}")));
    }
    if draws == 0 {
        return Err(AppError::config("--draws must be >= 1"));
    }
    let gamma_star = gamma_star.unwrap_or(exp.symbol.degree() as f64 + 1.0);
    let z = exp.z_points();
    if common.dry_run {
        print_plan("expand", &exp, z.len() * exp.config.sizes.len() * draws);
        return Ok(true);
    }
    let rows = harness::run_dominance(&exp.symbol, &z, &exp.config.sizes, draws, gamma_star, exp.config.seed).map_err(
        |e| match e {
            AppError::Core(Error::Boundary) => AppError::config("z list contains a boundary point"),
            AppError::Core(e @ Error::InvalidParameter(_)) => AppError::config(e.to_string()),
            e => e,
        },
    )?;
    let dir = prepare_output(&exp, "expand")?;
    match exp.config.outputs.format {
        RecordFormat::Csv => harness::write_dominance_csv(&dir.join("dominance.csv"), &rows)?,
        RecordFormat::Jsonl => write_records(&dir.join("dominance.jsonl"), RecordFormat::Jsonl, &rows)?,
    }
    for &zz in &z {
        for &n in &exp.config.sizes {
            let cell: Vec<_> = rows
                .iter()
                .filter(|r| r.n == n && r.z_re == zz.re && r.z_im == zz.im)
                .collect();
            let above: Vec<f64> = cell.iter().map(|r| r.ratio_above).collect();
            let pd: Vec<f64> = cell.iter().map(|r| r.normalized_pd).collect();
            let below: Vec<f64> = cell.iter().map(|r| r.ratio_below).collect();
            println!(
                "z={}{:+}i N={} frak_d={} median_ratio_above={:.3e} median_normalized_pd={:.3e} median_ratio_below={:.3e}",
                zz.re,
                zz.im,
                n,
                cell[0].dd,
                median(&above).unwrap_or(f64::NAN),
                median(&pd).unwrap_or(f64::NAN),
                median(&below).unwrap_or(f64::NAN)
            );
        }
    }
    Ok(true)
}

fn cmd_validate() -> bool {
    let checks = validate::suite();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    failed == 0
}

fn exit_code(e: &AppError) -> u8 {
    match e {
        AppError::Config(_) => 2,
        AppError::Core(Error::InvalidSymbol(_) | Error::SizeGuard { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = harness::configure_threads() {
        eprintln!("error: {e} (set {THREADS_ENV} to a positive integer)");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Spectrum(c) => cmd_spectrum(c),
        Command::Regions(c) => cmd_regions(c),
        Command::Logpot(c) => cmd_logpot(c),
        Command::Replace(c) => cmd_replace(c),
        Command::Expand {
            common,
            draws,
            gamma_star,
        } => cmd_expand(common, *draws, *gamma_star),
        Command::Validate => Ok(cmd_validate()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
