//! Batch front-end behind the `magsplit` binary.
//!
//! Every subcommand reads one JSON config, writes its tables to `--out`, and
//! finishes with `manifest.json` listing the files, the config hash and the
//! per-check outcome. Exit codes: 0 all checks pass, 1 checks failed,
//! 2 invalid input, 3 solver non-convergence.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::frozen;
use crate::hopping::{self, hopping_all_routes, hopping_bounds, hopping_ratio_check, kernel_samples};
use crate::model::{ModelConfig, WellSpec};
use crate::planar::{self, build_hamiltonian, default_shift, lowest_eigenpairs, splitting, splitting_extrapolated, Wells};
use crate::radial::{self, decay_bounds, normalization_bracket, overlap_well_integral, solve_ground_state, GroundState};
use crate::reduction::{effective_matrices, reduce_with, resolvent_probe};

/// λ|d|²/4 above this puts the gap under ~1e−13 and below eigensolver noise.
const DESK_EXPONENT: f64 = 30.0;
/// Landau-level runs cannot converge a single vector of the degenerate
/// cluster much below this.
const LANDAU_EIGEN_REL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "magsplit", version, about = "Tunneling splitting of two magnetic wells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory of cached ground states.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radial ground state and its decay curve.
    GroundState {
        /// Points on the decay curve over (a, 2|d|].
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// ρ by three routes, closed-form bounds and the ratio check.
    Hopping {
        /// Multipliers x for |ρ(x·d)/ρ(d)|.
        #[arg(long = "ratio-x", value_delimiter = ',', default_values_t = [std::f64::consts::SQRT_2])]
        ratio_x: Vec<f64>,
    },
    /// Planar double-well gap against 2|ρ|.
    Splitting {
        /// Extrapolate over spacings ℓ/n for these n (comma separated).
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<f64>,
    },
    /// Decay, normalization and hopping envelopes with frozen prefactors.
    Bounds,
    /// Schur reduction, planar gap and resolvent probe.
    Reduce {
        /// Also write φ₀ and φ̃_d as grid dumps.
        #[arg(long)]
        dump: bool,
    },
    /// Lowest eigenvalue without wells against the first Landau level.
    LandauCheck,
    /// Diagnostics table over the λ × |d| grid of a sweep config.
    Sweep,
}

/// Cartesian sweep over λ and |d| around a base config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ModelConfig,
    pub lambdas: Vec<f64>,
    /// Defaults to the base separation.
    #[serde(default)]
    pub separations: Vec<f64>,
    /// Spacing ladder ℓ/n for the extrapolated ratio; empty uses the base grid.
    #[serde(default)]
    pub ladder: Vec<f64>,
}

impl SweepConfig {
    /// Points in output order: separations outer, λ inner.
    pub fn points(&self) -> Vec<ModelConfig> {
        let seps = if self.separations.is_empty() { vec![self.base.separation] } else { self.separations.clone() };
        seps.iter()
            .flat_map(|&d| self.lambdas.iter().map(move |&l| (d, l)))
            .map(|(d, l)| self.base.with_lambda(l).with_separation(d))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// sha256 of the bytes in `config.json`.
    pub config_hash: String,
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Num)
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Int(n) => (*n).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

/// Output directory, format and the list of files written so far.
struct Sink {
    dir: PathBuf,
    format: Format,
    outputs: Vec<PathBuf>,
}

impl Sink {
    fn table(&mut self, stem: &str, t: &Table) -> Result<()> {
        let path = self.dir.join(format!("{stem}.{}", self.format.ext()));
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
                w.write_record(&t.headers).map_err(csv_err)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<serde_json::Map<String, serde_json::Value>> =
                    t.rows.iter().map(|row| t.headers.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect()).collect();
                fs::write(&path, serde_json::to_vec_pretty(&rows)?)?;
            }
        }
        self.outputs.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, serde_json::to_vec_pretty(value)?)?;
        self.outputs.push(path);
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Ground states keyed on (well, λ, b, radial tolerances), in memory and
/// optionally on disk.
pub struct GroundStateCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<String, Arc<GroundState>>>,
}

#[derive(Serialize)]
struct CacheKey<'a> {
    well: &'a WellSpec,
    lambda: f64,
    b: f64,
    quadrature_rel: f64,
    match_rel: f64,
}

impl GroundStateCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        GroundStateCache { dir, memory: Mutex::new(HashMap::new()) }
    }

    pub fn key(cfg: &ModelConfig) -> String {
        let key = CacheKey {
            well: &cfg.well,
            lambda: cfg.lambda,
            b: cfg.b(),
            quadrature_rel: cfg.tolerances.quadrature_rel,
            match_rel: cfg.tolerances.match_rel,
        };
        hex_sha256(&serde_json::to_vec(&key).expect("cache key serializes"))
    }

    pub fn path(&self, cfg: &ModelConfig) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("gs-{}.json", Self::key(cfg))))
    }

    /// Cached ground state, with `config` replaced by `cfg` (the radial
    /// solution does not depend on the separation or the grid).
    pub fn get(&self, cfg: &ModelConfig) -> Result<Arc<GroundState>> {
        let key = Self::key(cfg);
        if let Some(gs) = self.memory.lock().expect("cache lock").get(&key) {
            return Ok(Arc::new(GroundState { config: cfg.clone(), ..(**gs).clone() }));
        }
        let path = self.path(cfg);
        let loaded = match &path {
            Some(p) if p.exists() => Some(serde_json::from_slice::<GroundState>(&fs::read(p)?)?),
            _ => None,
        };
        let gs = match loaded {
            Some(gs) => GroundState { config: cfg.clone(), ..gs },
            None => {
                let gs = solve_ground_state(cfg)?;
                if let Some(p) = &path {
                    if let Some(parent) = p.parent() {
                        fs::create_dir_all(parent)?;
                    }
                    fs::write(p, serde_json::to_vec(&gs)?)?;
                }
                gs
            }
        };
        let gs = Arc::new(gs);
        self.memory.lock().expect("cache lock").insert(key, gs.clone());
        Ok(gs)
    }
}

fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Exit code for an error that stopped a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ReductionInvalid(_) => 1,
        Error::InvalidConfig(_) | Error::Domain(_) | Error::OutOfRegime(_) | Error::MemoryCap { .. } | Error::Io(_) | Error::Json(_) => 2,
        Error::NoConvergence { .. } | Error::NoBoundState { .. } | Error::Consistency(_) => 3,
    }
}

/// Parses `args` (program name first), runs the subcommand, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(m) => {
            for c in m.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {}: {}", c.name, c.detail);
            }
            if m.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read_config<T: for<'de> Deserialize<'de>>(cli: &Cli) -> Result<T> {
    let path = cli.config.as_ref().ok_or_else(|| Error::InvalidConfig("--config <path> is required".into()))?;
    let bytes = fs::read(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

fn warn_desk_scale(cfg: &ModelConfig) {
    let expo = cfg.lambda * cfg.separation * cfg.separation / 4.0;
    if expo > DESK_EXPONENT {
        eprintln!(
            "warning: λ|d|²/4 = {expo:.1} > {DESK_EXPONENT} at λ = {}, |d| = {}; the gap is likely below eigensolver noise",
            cfg.lambda, cfg.separation
        );
    }
}

fn execute(cli: &Cli) -> Result<RunManifest> {
    let started = unix_now();
    fs::create_dir_all(&cli.out)?;
    let mut sink = Sink { dir: cli.out.clone(), format: cli.format, outputs: Vec::new() };
    let cache = GroundStateCache::new(cli.cache.clone());
    let (name, config_bytes, checks) = match &cli.command {
        Command::Sweep => {
            let sweep: SweepConfig = read_config(cli)?;
            for p in sweep.points() {
                p.require_valid()?;
                warn_desk_scale(&p);
            }
            let bytes = serde_json::to_vec_pretty(&sweep)?;
            ("sweep", bytes, run_sweep(&sweep, &cache, &mut sink)?)
        }
        cmd => {
            let cfg: ModelConfig = read_config(cli)?;
            cfg.require_valid()?;
            warn_desk_scale(&cfg);
            let bytes = serde_json::to_vec_pretty(&cfg)?;
            let (name, checks) = match cmd {
                Command::GroundState { samples } => ("ground-state", run_ground_state(&cfg, *samples, &cache, &mut sink)?),
                Command::Hopping { ratio_x } => ("hopping", run_hopping(&cfg, ratio_x, &cache, &mut sink)?),
                Command::Splitting { ladder } => ("splitting", run_splitting(&cfg, ladder, &mut sink)?),
                Command::Bounds => ("bounds", run_bounds(&cfg, &cache, &mut sink)?),
                Command::Reduce { dump } => ("reduce", run_reduce(&cfg, *dump, &mut sink)?),
                Command::LandauCheck => ("landau-check", run_landau(&cfg, &mut sink)?),
                Command::Sweep => unreachable!("handled above"),
            };
            (name, bytes, checks)
        }
    };
    let config_path = cli.out.join("config.json");
    fs::write(&config_path, &config_bytes)?;
    sink.outputs.push(config_path);
    let manifest_path = cli.out.join("manifest.json");
    sink.outputs.push(manifest_path.clone());
    let manifest = RunManifest {
        command: name.to_string(),
        config_hash: hex_sha256(&config_bytes),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: unix_now(),
        outputs: sink.outputs.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    fs::write(&manifest_path, serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}

fn run_ground_state(cfg: &ModelConfig, samples: usize, cache: &GroundStateCache, sink: &mut Sink) -> Result<Vec<Check>> {
    let gs = cache.get(cfg)?;
    sink.table(
        "ground_state",
        &Table {
            headers: vec!["lambda", "depth", "radius", "e0", "alpha", "nu", "c_lambda", "match_residual", "norm_error"],
            rows: vec![vec![
                Cell::Num(gs.lambda()),
                Cell::Num(gs.depth()),
                Cell::Num(gs.radius()),
                Cell::Num(gs.e0),
                Cell::Num(gs.alpha),
                Cell::Num(gs.nu),
                Cell::Num(gs.c_lambda),
                Cell::Num(gs.match_residual),
                Cell::Num(gs.norm_error),
            ]],
        },
    )?;
    let (a, top) = (gs.radius(), 2.0 * cfg.separation);
    let bounds = decay_bounds(&gs);
    let mut rows = Vec::new();
    let mut positive = true;
    for k in 1..=samples.max(1) {
        let r = a + (top - a) * k as f64 / samples.max(1) as f64;
        let lp = gs.log_phi_out(r)?;
        positive &= lp.is_finite();
        rows.push(vec![
            Cell::Num(r),
            Cell::Num(lp),
            Cell::Num(bounds.log_lower(r)),
            Cell::Num(bounds.log_upper(r)),
            Cell::opt(hopping::laplace_exterior_asymptote(&gs, r).ok().map(f64::ln)),
        ]);
    }
    sink.table("decay_curve", &Table { headers: vec!["r", "log_phi", "log_lower", "log_upper", "log_laplace"], rows })?;
    println!("e0 = {:.12e}  C_λ = {:.6e}  ν = {:.6}", gs.e0, gs.c_lambda, gs.nu);
    let match_tol = 10.0 * cfg.tolerances.match_rel;
    Ok(vec![
        check("match_residual", gs.match_residual <= match_tol, format!("{:.3e} vs {match_tol:.1e}", gs.match_residual)),
        check("normalization", gs.norm_error <= 1e-8, format!("|‖φ‖² − 1| = {:.3e}", gs.norm_error)),
        check("exterior_positive", positive, "φ_out > 0 on the decay curve"),
    ])
}

fn run_hopping(cfg: &ModelConfig, ratio_x: &[f64], cache: &GroundStateCache, sink: &mut Sink) -> Result<Vec<Check>> {
    let gs = cache.get(cfg)?;
    let dist = cfg.separation;
    let hr = hopping_all_routes(&gs, dist)?;
    let hb = hopping_bounds(&gs, dist)?;
    let direct = hr.rho_direct.unwrap_or_default();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &x in ratio_x {
        let rr = hopping_ratio_check(&gs, dist, x)?;
        rows.push(vec![
            Cell::Num(cfg.lambda),
            Cell::Num(dist),
            Cell::Num(hr.rho_bessel),
            Cell::opt(hr.rho_angular),
            Cell::Num(direct.re),
            Cell::Num(direct.im),
            Cell::Num(hb.lower()),
            Cell::Num(hb.upper()),
            Cell::Num(x),
            Cell::Num(rr.log_ratio),
            Cell::Num(rr.log_bound),
        ]);
        checks.push(check(
            format!("ratio_bound x={x}"),
            rr.passed,
            format!("ln ratio {:.4} ≤ {:.4}, kernel ratio {:.3e} ≤ {:.3}", rr.log_ratio, rr.log_bound, rr.kernel_ratio_max, rr.c_star),
        ));
    }
    sink.table(
        "hopping",
        &Table {
            headers: vec![
                "lambda",
                "dist",
                "rho_bessel",
                "rho_angular",
                "rho_direct_re",
                "rho_direct_im",
                "lower",
                "upper",
                "ratio_x",
                "log_ratio",
                "log_ratio_bound",
            ],
            rows,
        },
    )?;
    println!(
        "ρ: bessel {:.10e}  angular {:.10e}  direct {:.10e}{:+.2e}i",
        hr.rho_bessel,
        hr.rho_angular.unwrap_or(f64::NAN),
        direct.re,
        direct.im
    );
    let dis = hr.route_disagreement();
    let mut all = vec![
        check("routes_agree", hr.failed_routes.is_empty() && dis <= 1e-4, format!("max relative disagreement {dis:.3e}")),
        check(
            "direct_real",
            hr.direct_imaginary_ratio().is_some_and(|r| r <= 1e-8),
            format!("|Im ρ|/|ρ| = {:?}", hr.direct_imaginary_ratio()),
        ),
    ];
    let samples = kernel_samples(&gs, dist, 200)?;
    let bad = samples.iter().filter(|s| !(s.l_value > 0.0)).count();
    all.push(check("kernel_positive", bad == 0, format!("{bad} of {} samples ≤ 0", samples.len())));
    all.extend(checks);
    Ok(all)
}

fn run_splitting(cfg: &ModelConfig, ladder: &[f64], sink: &mut Sink) -> Result<Vec<Check>> {
    let headers = vec!["level", "spacing", "e0", "e1", "gap", "rho_abs", "ratio", "resolved"];
    let row = |level: Cell, r: &planar::SplittingReport| {
        vec![
            level,
            Cell::Num(r.spacing),
            Cell::Num(r.e0),
            Cell::Num(r.e1),
            Cell::Num(r.gap),
            Cell::Num(r.rho_abs),
            Cell::Num(r.ratio),
            Cell::Bool(r.resolved),
        ]
    };
    let (rows, ratio, resolved) = if ladder.is_empty() {
        let r = splitting(cfg)?;
        (vec![row(Cell::Num(cfg.grid.divisions), &r)], r.ratio, r.resolved)
    } else {
        let ext = splitting_extrapolated(cfg, ladder)?;
        let mut rows: Vec<Vec<Cell>> = ladder.iter().zip(&ext.levels).map(|(&n, r)| row(Cell::Num(n), r)).collect();
        rows.push(vec![
            Cell::Text("extrapolated".into()),
            Cell::Num(0.0),
            Cell::Empty,
            Cell::Empty,
            Cell::Num(ext.gap),
            Cell::Num(ext.rho_abs),
            Cell::Num(ext.ratio),
            Cell::Bool(ext.levels.iter().all(|r| r.resolved)),
        ]);
        (rows, ext.ratio, ext.levels.iter().all(|r| r.resolved))
    };
    sink.table("splitting", &Table { headers, rows })?;
    println!("gap/(2|ρ|) = {ratio:.6}{}", if resolved { "" } else { " (gap unresolved)" });
    Ok(vec![
        check("gap_resolved", resolved, "gap ≥ 10·eigen_rel·|E₀|; lower eigen_rel to resolve it"),
        check("ratio_window", !resolved || (0.5..=1.5).contains(&ratio), format!("gap/(2|ρ|) = {ratio:.4}")),
    ])
}

fn run_bounds(cfg: &ModelConfig, cache: &GroundStateCache, sink: &mut Sink) -> Result<Vec<Check>> {
    let gs = cache.get(cfg)?;
    let (l, a, dist) = (cfg.lambda, cfg.well.radius, cfg.separation);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut add = |name: &str, value: f64, lower: f64, upper: f64, passed: bool| {
        rows.push(vec![Cell::Text(name.into()), Cell::Num(value), Cell::Num(lower), Cell::Num(upper), Cell::Bool(passed)]);
        passed
    };

    // log values throughout; lower/upper are the windowed limits
    let db = decay_bounds(&gs);
    let mut decay_ok = true;
    for k in 1..=32 {
        let r = a + (2.0 * dist - a) * k as f64 / 32.0;
        let lp = gs.log_phi_out(r)?;
        let lo = db.log_lower(r) + frozen::DECAY_LOWER_K.ln() - frozen::WINDOW.ln();
        let hi = db.log_upper(r) + frozen::DECAY_UPPER_K.ln() + frozen::WINDOW.ln();
        decay_ok &= add(&format!("log_phi(r={r:.4})"), lp, lo, hi, lp >= lo && lp <= hi);
    }
    checks.push(check("decay_sandwich", decay_ok, "ln φ_out within the windowed envelopes on (a, 2|d|]"));

    let nb = normalization_bracket(&gs)?;
    let lo = nb.log_lower_shape + frozen::CLAMBDA_LOWER_K.ln() - frozen::WINDOW.ln();
    let hi = nb.log_upper + frozen::CLAMBDA_UPPER_K.ln() + frozen::WINDOW.ln();
    let ok = add("log_c_lambda", gs.log_c_lambda, lo, hi, gs.log_c_lambda >= lo && gs.log_c_lambda <= hi);
    checks.push(check("c_lambda_bracket", ok, format!("ln C_λ = {:.4} in [{lo:.4}, {hi:.4}]", gs.log_c_lambda)));

    let hb = hopping_bounds(&gs, dist)?;
    let log_rho = hopping::log_abs_rho(&gs, dist)?;
    let lo = hb.log_lower + frozen::HOP_LOWER_K.ln() - frozen::WINDOW.ln();
    let hi = hb.log_upper + frozen::HOP_UPPER_K.ln() + frozen::WINDOW.ln();
    let ok = add("log_abs_rho", log_rho, lo, hi, log_rho >= lo && log_rho <= hi);
    checks.push(check("hopping_sandwich", ok, format!("ln|ρ| = {log_rho:.4} in [{lo:.4}, {hi:.4}]")));

    let (rate, slack) = (-4.0 / l * log_rho, frozen::RATE_SLACK_C * l.ln() / l);
    let (lo, hi) = (-4.0 / l * hb.log_upper - slack, -4.0 / l * hb.log_lower + slack);
    let ok = add("rate", rate, lo, hi, rate >= lo && rate <= hi);
    checks.push(check("hopping_rate", ok, format!("−(4/λ)ln|ρ| = {rate:.4} in [{lo:.4}, {hi:.4}]")));

    let ov = overlap_well_integral(&gs)?;
    let cap = frozen::WINDOW * frozen::SUP_NORM_K;
    let ok = add("sup_phi_over_lambda_sq", ov.sup_over_lambda_sq, 0.0, cap, ov.sup_over_lambda_sq <= cap);
    checks.push(check("sup_norm", ok, format!("sup φ/λ² = {:.3e} ≤ {cap:.3e}", ov.sup_over_lambda_sq)));
    let ok = add("overlap_integral", ov.value, 0.0, f64::INFINITY, ov.value > 0.0);
    checks.push(check("overlap_positive", ok, format!("∫φ|v|r dr = {:.3e}", ov.value)));

    // the Laplace form is only asserted where its regime guard admits it
    let mut worst: Option<f64> = None;
    for k in 0..=12 {
        let r = a * (1.5 + 1.5 * k as f64 / 12.0);
        match hopping::laplace_exterior_asymptote(&gs, r) {
            Ok(v) => {
                let exact = radial::evaluate_phi_out(&gs, r)?;
                let rel = (v / exact - 1.0).abs();
                add(&format!("laplace_rel_err(r={r:.4})"), rel, 0.0, 0.05, rel <= 0.05);
                worst = Some(worst.map_or(rel, |w: f64| w.max(rel)));
            }
            Err(Error::OutOfRegime(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if let Some(w) = worst {
        checks.push(check("laplace_asymptote", w <= 0.05, format!("max relative error {w:.3e} on [1.5a, 3a]")));
    }
    sink.table("bounds", &Table { headers: vec!["quantity", "value", "lower", "upper", "passed"], rows })?;
    Ok(checks)
}

fn run_reduce(cfg: &ModelConfig, dump: bool, sink: &mut Sink) -> Result<Vec<Check>> {
    let em = effective_matrices(cfg, true)?;
    let rep = reduce_with(cfg, &em)?;
    if dump {
        planar::write_grid_dump(&sink.dir.join("phi0"), &em.op.grid, &em.pair.phi0)?;
        planar::write_grid_dump(&sink.dir.join("phi_tilde_d"), &em.op.grid, &em.pair.phi_tilde_d)?;
        for stem in ["phi0", "phi_tilde_d"] {
            sink.outputs.push(sink.dir.join(format!("{stem}.bin")));
            sink.outputs.push(sink.dir.join(format!("{stem}.json")));
        }
    }
    drop(em);
    let pl = splitting(cfg)?;
    let probe = resolvent_probe(cfg, 0.0, Wells::Double)?;
    sink.table(
        "diagnostics",
        &Table {
            headers: vec!["lambda", "rho_abs", "gap_planar", "gap_reduction", "ratio", "max_f", "max_g", "resolvent_probe"],
            rows: vec![vec![
                Cell::Num(cfg.lambda),
                Cell::Num(pl.rho_abs),
                Cell::Num(pl.gap),
                Cell::Num(rep.gap),
                Cell::Num(pl.ratio),
                Cell::Num(rep.max_abs_f),
                Cell::Num(rep.max_abs_g),
                Cell::Num(probe.probe),
            ]],
        },
    )?;
    sink.json("reduction.json", &rep)?;
    let rel = (rep.gap - pl.gap).abs() / pl.gap.abs();
    println!("gap: reduction {:.8e}  planar {:.8e}  rel {rel:.2e}", rep.gap, pl.gap);
    Ok(vec![
        check("gap_resolved", pl.resolved, "planar gap ≥ 10·eigen_rel·|E₀|"),
        check("reduction_vs_planar", !pl.resolved || rel <= 0.05, format!("relative difference {rel:.3e}")),
        check("imag_residue", rep.imag_residue <= 1e-8, format!("{:.3e}", rep.imag_residue)),
    ])
}

fn run_landau(cfg: &ModelConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let mut cfg = cfg.clone();
    cfg.tolerances.eigen_rel = cfg.tolerances.eigen_rel.max(LANDAU_EIGEN_REL);
    let op = build_hamiltonian(&cfg, Wells::None)?;
    let eig = lowest_eigenpairs(&op, 1, default_shift(&cfg, Wells::None)?)?;
    let e = eig.eigenvalues[0];
    let rel = (e / cfg.lambda - 1.0).abs();
    println!("lowest eigenvalue {e:.8}  |E₀/λ − 1| = {rel:.3e}");
    sink.table(
        "landau",
        &Table {
            headers: vec!["lambda", "spacing", "sites", "e0", "rel_err", "residual"],
            rows: vec![vec![
                Cell::Num(cfg.lambda),
                Cell::Num(op.grid.h),
                Cell::Int(op.dimension() as u64),
                Cell::Num(e),
                Cell::Num(rel),
                Cell::Num(eig.residuals[0]),
            ]],
        },
    )?;
    Ok(vec![check("landau_level", rel <= 0.01, format!("|E₀/λ − 1| = {rel:.3e}"))])
}

/// One row of the diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub dist: f64,
    pub rho_abs: f64,
    pub gap_planar: f64,
    pub gap_extrapolated: Option<f64>,
    pub gap_reduction: f64,
    /// gap/(2|ρ|), from the extrapolated gap when a ladder is set
    pub ratio: f64,
    pub resolved: bool,
    pub max_f: f64,
    pub max_g: f64,
    pub resolvent_probe: f64,
}

pub fn sweep_point(cfg: &ModelConfig, ladder: &[f64], cache: &GroundStateCache) -> Result<SweepRow> {
    let gs = cache.get(cfg)?;
    let rho_abs = hopping::log_abs_rho(&gs, cfg.separation)?.exp();
    let pl = splitting(cfg)?;
    let ext = if ladder.is_empty() { None } else { Some(splitting_extrapolated(cfg, ladder)?) };
    let red = reduce_with(cfg, &effective_matrices(cfg, true)?)?;
    let probe = resolvent_probe(cfg, 0.0, Wells::Double)?;
    let gap = ext.as_ref().map_or(pl.gap, |e| e.gap);
    let resolved = pl.resolved && ext.as_ref().is_none_or(|e| e.levels.iter().all(|r| r.resolved));
    Ok(SweepRow {
        lambda: cfg.lambda,
        dist: cfg.separation,
        rho_abs,
        gap_planar: pl.gap,
        gap_extrapolated: ext.as_ref().map(|e| e.gap),
        gap_reduction: red.gap,
        ratio: gap / (2.0 * rho_abs),
        resolved,
        max_f: red.max_abs_f,
        max_g: red.max_abs_g,
        resolvent_probe: probe.probe,
    })
}

/// Trend checks on rows sharing one separation, ordered by λ.
pub fn sweep_checks(rows: &[SweepRow]) -> Vec<Check> {
    let mut out = Vec::new();
    let mut seps: Vec<f64> = Vec::new();
    for r in rows {
        if !seps.contains(&r.dist) {
            seps.push(r.dist);
        }
    }
    for d in seps {
        let mut group: Vec<&SweepRow> = rows.iter().filter(|r| r.dist == d).collect();
        group.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let tag = format!("|d|={d}");
        let bad: Vec<f64> = group.iter().filter(|r| !(0.5..=1.5).contains(&r.ratio)).map(|r| r.lambda).collect();
        out.push(check(format!("ratio_window {tag}"), bad.is_empty(), format!("outside [0.5, 1.5] at λ = {bad:?}")));
        let dev: Vec<f64> = group.iter().map(|r| (r.ratio - 1.0).abs()).collect();
        let inversions = dev.windows(2).filter(|w| w[1] > w[0]).count();
        out.push(check(format!("ratio_trend {tag}"), inversions <= 1, format!("|ratio − 1| = {dev:.4?}, {inversions} inversions")));
        if let Some(last) = group.last() {
            out.push(check(
                format!("ratio_final {tag}"),
                (last.ratio - 1.0).abs() <= 0.2,
                format!("ratio {:.4} at λ = {}", last.ratio, last.lambda),
            ));
        }
        let bad: Vec<f64> = group
            .iter()
            .filter(|r| r.resolved && (r.gap_reduction - r.gap_planar).abs() > 0.05 * r.gap_planar.abs())
            .map(|r| r.lambda)
            .collect();
        out.push(check(format!("reduction_vs_planar {tag}"), bad.is_empty(), format!("> 5% apart at λ = {bad:?}")));
        let fg: Vec<f64> = group.iter().map(|r| r.max_f.max(r.max_g)).collect();
        out.push(check(
            format!("fg_decreasing {tag}"),
            fg.windows(2).all(|w| w[1] < w[0]),
            format!("max(|f|, |g|) = {}", fg.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")),
        ));
        let probes: Vec<f64> = group.iter().map(|r| r.resolvent_probe).collect();
        let (lo, hi) = probes.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        out.push(check(format!("probe_stable {tag}"), hi <= 2.0 * lo, format!("probe in [{lo:.4e}, {hi:.4e}]")));
    }
    out
}

fn run_sweep(sweep: &SweepConfig, cache: &GroundStateCache, sink: &mut Sink) -> Result<Vec<Check>> {
    let points = sweep.points();
    // rows come back in config order whatever the completion order
    let results: Vec<Result<SweepRow>> = points.par_iter().map(|p| sweep_point(p, &sweep.ladder, cache)).collect();
    let rows: Vec<SweepRow> = results.into_iter().collect::<Result<_>>()?;
    sink.table(
        "diagnostics",
        &Table {
            headers: vec![
                "lambda",
                "dist",
                "rho_abs",
                "gap_planar",
                "gap_extrapolated",
                "gap_reduction",
                "ratio",
                "max_f",
                "max_g",
                "resolvent_probe",
            ],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Num(r.lambda),
                        Cell::Num(r.dist),
                        Cell::Num(r.rho_abs),
                        Cell::Num(r.gap_planar),
                        Cell::opt(r.gap_extrapolated),
                        Cell::Num(r.gap_reduction),
                        Cell::Num(r.ratio),
                        Cell::Num(r.max_f),
                        Cell::Num(r.max_g),
                        Cell::Num(r.resolvent_probe),
                    ]
                })
                .collect(),
        },
    )?;
    for r in &rows {
        println!("λ = {:>5}  |d| = {}  ratio = {:.5}", r.lambda, r.dist, r.ratio);
    }
    Ok(sweep_checks(&rows))
}
