//! Subcommands behind the `olp-lab` binary.
//!
//! Output files are written only after every replication has been gathered
//! in replication order, so their bytes do not depend on the thread count.

use crate::analysis::{
    dual_convergence_curve, estimate_regret_crn, fit_points, state_deviation_paths, AnalysisError, FitModel, FitResult,
};
use crate::config::{ConfigError, ExperimentConfig};
use crate::gens::{instance_key, nondegeneracy_estimate, validate_generator, Purpose, StreamKey, ValidationGrid, Violation};
use crate::lp::{solve_dual_breakpoint, solve_dual_simplex};
use crate::types::Order;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const THREADS_ENV: &str = "OLP_LAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Param(s) => CliError::Config(s),
            other => CliError::Solver(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Everything needed to replay a run; `olp-lab run` accepts this file in
/// place of a TOML config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub generator_label: String,
    /// Instance stream digests per horizon, in replication order.
    pub seed_branches: BTreeMap<usize, Vec<u64>>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub outputs: PathBuf,
    pub files: Vec<PathBuf>,
    pub threads: usize,
}

/// Thread count: explicit flag, then the environment variable, then all
/// logical cores.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t.max(1));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|t| t.max(1))
            .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Reads a TOML config, or the config embedded in a run manifest (`.json`).
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        let m: RunManifest =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        m.config.validate()?;
        return Ok(m.config);
    }
    ExperimentConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn write_csv<S: Serialize>(path: &Path, rows: &[S], header: &[&str]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

#[derive(Serialize)]
struct DualRow {
    n: usize,
    replication: u64,
    sq_dist: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FitEntry {
    policy: String,
    power_law_n: Option<FitResult>,
    polylog: Option<FitResult>,
}

/// `olp-lab run`: regret and the enabled analyses, written to the
/// configured output directory (or `outputs_override`).
pub fn cmd_run(config: &Path, threads: Option<usize>, outputs_override: Option<&Path>) -> Result<RunSummary, CliError> {
    let mut cfg = load_config(config)?;
    if let Some(o) = outputs_override {
        cfg.outputs = o.to_path_buf();
    }
    let threads = resolve_threads(threads)?;
    let spec = cfg.generator_spec()?;
    let out = cfg.outputs.clone();
    fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
    let a = cfg.analysis.clone();
    let mut files = Vec::new();

    let regret = if a.regret {
        let per_n = with_pool(threads, || {
            cfg.n_grid
                .iter()
                .map(|&n| estimate_regret_crn(&spec, &cfg.policies, n, &cfg.d0, cfg.reps, cfg.seed))
                .collect::<Result<Vec<_>, _>>()
        })??;
        // rows ordered by (n, policy, replication)
        let rows: Vec<_> = per_n.iter().flatten().flat_map(|e| e.records.iter().cloned()).collect();
        let path = out.join("regret.csv");
        write_csv(&path, &rows, &["n", "policy", "replication", "offline_value", "reward", "regret", "seed_branch"])?;
        files.push(path);
        Some(per_n)
    } else {
        None
    };

    if a.dual_convergence {
        let curve = with_pool(threads, || {
            dual_convergence_curve(&spec, &cfg.n_grid, &cfg.d0, cfg.reps, cfg.seed, a.price_reference)
        })??;
        let rows: Vec<DualRow> = curve
            .iter()
            .flat_map(|pt| {
                pt.sq_dists.iter().enumerate().map(move |(r, &sq_dist)| DualRow { n: pt.n, replication: r as u64, sq_dist })
            })
            .collect();
        let path = out.join("dual_convergence.csv");
        write_csv(&path, &rows, &["n", "replication", "sq_dist"])?;
        files.push(path);
    }

    if a.state_deviation {
        let policy = cfg.deviation_policy().clone();
        let mut rows = Vec::new();
        for &n in &cfg.n_grid {
            let rep = with_pool(threads, || {
                state_deviation_paths(
                    &spec,
                    &policy,
                    n,
                    &cfg.d0,
                    cfg.reps,
                    a.eps_d,
                    cfg.seed,
                    a.price_reference,
                    a.delta_k,
                    a.deviation_stride,
                )
            })??;
            rows.extend(rep.rows);
        }
        let path = out.join("state_deviation.csv");
        write_csv(&path, &rows, &["n", "replication", "j", "deviation", "exited"])?;
        files.push(path);
    }

    if let (true, Some(per_n)) = (a.fit, &regret) {
        let entries: Vec<FitEntry> = cfg
            .policies
            .iter()
            .enumerate()
            .map(|(k, pol)| {
                let pts: Vec<(usize, f64)> = per_n.iter().map(|e| (e[k].n, e[k].mean_regret)).collect();
                FitEntry {
                    policy: pol.label(),
                    power_law_n: fit_points(&pts, FitModel::PowerLawN).ok(),
                    polylog: fit_points(&pts, FitModel::Polylog).ok(),
                }
            })
            .collect();
        let path = out.join("fit.json");
        let text = serde_json::to_string_pretty(&entries).map_err(|e| io_err(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
        files.push(path);
    }

    let manifest_path = out.join("run_manifest.json");
    let manifest = RunManifest {
        tool: "olp-lab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        generator_label: spec.label(),
        seed_branches: cfg
            .n_grid
            .iter()
            .map(|&n| (n, (0..cfg.reps as u64).map(|r| instance_key(cfg.seed, n, r).digest()).collect()))
            .collect(),
        files: files.iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect(),
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| io_err(&manifest_path, e))?;
    fs::write(&manifest_path, text + "\n").map_err(|e| io_err(&manifest_path, e))?;
    files.push(manifest_path);
    Ok(RunSummary { outputs: out, files, threads })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverCheck {
    pub instances: usize,
    pub max_objective_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub generator: String,
    pub violations: Vec<Violation>,
    /// `(p*, inf aᵀp*, sup aᵀp*)` at `t = 0` for the first horizon.
    pub nondegeneracy: Option<(Vec<f64>, f64, f64)>,
    pub solver_check: SolverCheck,
}

impl ValidationReport {
    pub fn generator_passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self) -> String {
        use crate::gens::ViolationKind::*;
        let mut s = format!("generator {}\n", self.generator);
        for kind in [DensityLowerBound, DensityUpperBound, Normalization, Support, Smoothness, TimeSmoothness] {
            match self.violations.iter().find(|v| v.kind == kind) {
                None => s += &format!("  {kind}: pass\n"),
                Some(v) => s += &format!("  {kind}: FAIL ({} grid points; first: {})\n", v.occurrences, v.detail),
            }
        }
        if let Some((p, lo, hi)) = &self.nondegeneracy {
            s += &format!("  population price {p:?}: aᵀp* ranges over [{lo}, {hi}]\n");
        }
        let c = &self.solver_check;
        s += &format!(
            "solver cross-check: {} ({} random duals, max objective gap {:e}, tolerance {:e})\n",
            if c.passed { "pass" } else { "FAIL" },
            c.instances,
            c.max_objective_gap,
            c.tolerance
        );
        s
    }
}

/// Breakpoint vs simplex objective gap on `count` random single-resource
/// duals (`N ≤ 50`, `u ~ U(0,1)`, `a ~ U(0.5,1.5)`, `d ~ U(0.1,1)`).
pub fn solver_cross_check(count: usize, seed: u64) -> Result<SolverCheck, CliError> {
    let mut gap: f64 = 0.0;
    for i in 0..count {
        let mut rng = StreamKey::new(seed, Purpose::SolverCheck).index(i as u64).rng();
        let len = rng.gen_range(1..=50);
        let orders: Vec<Order> = (0..len).map(|_| Order::scalar(rng.gen::<f64>(), rng.gen_range(0.5..1.5))).collect();
        let d = rng.gen_range(0.1..1.0);
        let bp = solve_dual_breakpoint(&orders, d).map_err(|e| CliError::Solver(format!("breakpoint, instance {i}: {e}")))?;
        let sx = solve_dual_simplex(&orders, &[d]).map_err(|e| CliError::Solver(format!("simplex, instance {i}: {e}")))?;
        gap = gap.max((bp.objective - sx.objective).abs());
    }
    let tolerance = 1e-8;
    Ok(SolverCheck { instances: count, max_objective_gap: gap, tolerance, passed: gap < tolerance })
}

/// `olp-lab validate`: generator grid checks plus the solver cross-check.
pub fn cmd_validate(config: &Path) -> Result<ValidationReport, CliError> {
    let cfg = load_config(config)?;
    let spec = cfg.generator_spec()?;
    let violations = validate_generator(&spec, ValidationGrid::default());
    let nondegeneracy = nondegeneracy_estimate(&spec, cfg.n_grid[0], &cfg.d0).ok();
    let solver_check = solver_cross_check(50, cfg.seed)?;
    Ok(ValidationReport { generator: spec.label(), violations, nondegeneracy, solver_check })
}

#[derive(Debug, Deserialize)]
struct RegretRow {
    n: usize,
    policy: String,
    regret: f64,
}

/// `olp-lab fit`: fits mean regret per horizon from a `regret.csv`.
///
/// Returns the [`FitResult`] as JSON when the file holds one policy, and an
/// object keyed by policy otherwise.
pub fn cmd_fit(csv_path: &Path, model: FitModel) -> Result<String, CliError> {
    let mut rdr = csv::Reader::from_path(csv_path).map_err(|e| io_err(csv_path, e))?;
    let mut sums: BTreeMap<String, BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
    for (line, rec) in rdr.deserialize::<RegretRow>().enumerate() {
        let r = rec.map_err(|e| CliError::Config(format!("{} row {}: {e}", csv_path.display(), line + 1)))?;
        let e = sums.entry(r.policy).or_default().entry(r.n).or_insert((0.0, 0));
        e.0 += r.regret;
        e.1 += 1;
    }
    if sums.is_empty() {
        return Err(CliError::Config(format!("{}: no data rows", csv_path.display())));
    }
    let mut fits = BTreeMap::new();
    for (policy, by_n) in &sums {
        let pts: Vec<(usize, f64)> = by_n.iter().map(|(&n, &(s, c))| (n, s / c as f64)).collect();
        let fit = fit_points(&pts, model).map_err(|e| CliError::Config(format!("policy {policy}: {e}")))?;
        fits.insert(policy.clone(), fit);
    }
    let text = if fits.len() == 1 {
        serde_json::to_string_pretty(fits.values().next().expect("one fit"))
    } else {
        serde_json::to_string_pretty(&fits)
    };
    text.map_err(|e| CliError::Io(e.to_string()))
}
