//! The `uctrl` command line: build circuits, verify them against tasks,
//! probe windings, scan the sphere and sweep one-parameter families.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use uctrl_core::constructions::{by_name, composed_principal_root, constant_circuit, ComposedRoot};
use uctrl_core::ir::{self, Outcome, VerificationReport};
use uctrl_core::linalg::{haar_unitary, CMatrix, C64, ZERO};
use uctrl_core::model::checks::random_phases;
use uctrl_core::model::{
    check_clean, check_exact, check_neutralises, eps_distance_estimate, numeric_homogeneity_check, success_prob,
};
use uctrl_core::topology::{bu_scan, dichotomy_probe, extract_h, LoopKind, ProbeOptions, SphereGrid, Witness};
use uctrl_core::{Error, OracleAlgorithm, Program, Task, TaskKind};

#[derive(Parser, Debug)]
#[command(name = "uctrl", version, about = "Build, verify and probe postselection oracle algorithms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Oracle dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Power of the controlled task (or of `U ↦ U^q`).
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of Haar oracles per check.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Initial loop sample count.
    #[arg(long = "K", default_value_t = 256)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit the IR of a shipped construction.
    Build {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a checker over Haar oracles.
    Verify {
        /// IR file or built-in name.
        source: String,
        #[arg(long, default_value = "cUm")]
        task: String,
        #[arg(long, value_enum, default_value_t = Check::Exact)]
        check: Check,
        #[command(flatten)]
        common: Common,
    },
    /// Wind the phase witness along the central and generator loops.
    Probe {
        source: String,
        #[arg(long, value_enum, default_value_t = WitnessArg::H)]
        witness: WitnessArg,
        /// Skip the generator loop.
        #[arg(long)]
        central_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Scan `h ∘ g` over a grid on S³; `h` is `U₀₀` unless a source is given.
    BuScan {
        source: Option<String>,
        /// Minimum number of grid points.
        #[arg(long, default_value_t = 100_000)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Per-oracle residual, phase, success probability and ε along a family.
    Sweep {
        source: String,
        #[arg(long, default_value = "cUm")]
        task: String,
        #[arg(long, value_enum, default_value_t = Grid::Theta)]
        grid: Grid,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Exact,
    Eps,
    Clean,
    Homogeneity,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessArg {
    H,
    Fplus,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    /// `diag(1, …, 1, e^{iθ})`, θ ∈ [0, 2π).
    Theta,
    /// `e^{2πit}·Id`.
    Central,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Build,
    Verify,
    Probe,
    BuScan,
    Sweep,
}

/// Validated parameters shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub d: usize,
    pub m: Option<i32>,
    pub seed: u64,
    pub samples: usize,
    pub k: usize,
    pub tol: f64,
    pub input: Option<String>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandKind, c: &Common, input: Option<String>) -> Result<Self, Error> {
        if !(2..=4).contains(&c.d) {
            return Err(Error::InvalidArgument(format!("--d must be in [2, 4], got {}", c.d)));
        }
        if c.k < 16 || !c.k.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("--K must be a power of two ≥ 16, got {}", c.k)));
        }
        if !(c.tol > 0.0 && c.tol <= 1e-2) {
            return Err(Error::InvalidArgument(format!("--tol must be in (0, 1e-2], got {}", c.tol)));
        }
        Ok(RunConfig {
            command,
            d: c.d,
            m: c.m,
            seed: c.seed,
            samples: c.samples,
            k: c.k,
            tol: c.tol,
            input,
            output: c.out.clone(),
        })
    }
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Fail = 1,
    ModelViolation = 2,
    InputError = 3,
}

impl Exit {
    pub fn of_error(e: &Error) -> Exit {
        match e {
            Error::ModelViolation { .. } => Exit::ModelViolation,
            _ => Exit::InputError,
        }
    }
}

/// A program loaded from an IR file or by built-in name.
pub enum Source {
    Circuit(OracleAlgorithm),
    Root(ComposedRoot),
}

impl Source {
    pub fn load(spec: &str, d: usize, m: Option<i32>) -> Result<Source, Error> {
        let path = Path::new(spec);
        if path.exists() || spec.ends_with(".json") {
            return ir::read_file(path).map(Source::Circuit);
        }
        match spec {
            "root-composed" => composed_principal_root(d).map(Source::Root),
            "constant-circuit" => constant_circuit(d).map(Source::Circuit),
            name => by_name(name, d, m).map(Source::Circuit),
        }
    }

    pub fn program(&self) -> &dyn Program {
        match self {
            Source::Circuit(a) => a,
            Source::Root(r) => r,
        }
    }

    fn task(&self, name: &str, m: Option<i32>) -> Result<Task, Error> {
        let d = self.program().oracle_dim();
        let kind = match name {
            "cUm" | "cum" => TaskKind::CUm { m: m.unwrap_or(d as i32) },
            "conjugation" => TaskKind::Conjugation,
            "transpose" => TaskKind::Transpose,
            "inverse" => TaskKind::Inverse,
            "power" => TaskKind::Power { q: m.ok_or_else(|| Error::InvalidArgument("task power needs --m".into()))? },
            other => return Err(Error::InvalidArgument(format!("unknown task `{other}`"))),
        };
        let task = Task::new(d, kind)?;
        Ok(match self {
            Source::Root(_) => task.with_alphabet(&["root"]),
            Source::Circuit(_) => task,
        })
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialise") + "\n"
}

/// Runs one parsed command line, writing results to `stdout` or `--out`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Exit, Error> {
    match cli.command {
        Command::Build { name, common } => {
            let cfg = RunConfig::new(CommandKind::Build, &common, Some(name))?;
            cmd_build(&cfg, stdout)
        }
        Command::Verify { source, task, check, common } => {
            let cfg = RunConfig::new(CommandKind::Verify, &common, Some(source))?;
            cmd_verify(&cfg, &task, check, stdout)
        }
        Command::Probe { source, witness, central_only, common } => {
            let cfg = RunConfig::new(CommandKind::Probe, &common, Some(source))?;
            let opts = ProbeOptions {
                witness: match witness {
                    WitnessArg::H => Witness::H,
                    WitnessArg::Fplus => Witness::FPlus,
                },
                generator: !central_only,
                ..ProbeOptions::default()
            };
            cmd_probe(&cfg, &opts, stdout)
        }
        Command::BuScan { source, points, common } => {
            let cfg = RunConfig::new(CommandKind::BuScan, &common, source)?;
            cmd_bu_scan(&cfg, points, stdout)
        }
        Command::Sweep { source, task, grid, points, common } => {
            let cfg = RunConfig::new(CommandKind::Sweep, &common, Some(source))?;
            cmd_sweep(&cfg, &task, grid, points, stdout)
        }
    }
}

fn input(cfg: &RunConfig) -> &str {
    cfg.input.as_deref().unwrap_or_default()
}

pub fn cmd_build(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Exit, Error> {
    let alg = match Source::load(input(cfg), cfg.d, cfg.m)? {
        Source::Circuit(a) => a,
        Source::Root(_) => {
            return Err(Error::Unsupported("root-composed is an evaluator, not a circuit".into()));
        }
    };
    emit(&cfg.output, &(ir::to_string_pretty(&alg)? + "\n"), stdout)?;
    Ok(Exit::Pass)
}

fn oracles(d: usize, n: usize, seed: u64) -> Vec<CMatrix> {
    (0..n as u64).map(|i| haar_unitary(d, seed.wrapping_add(i))).collect()
}

fn violation_report(check: &str, cfg: &RunConfig, e: &Error) -> VerificationReport {
    VerificationReport {
        check: check.into(),
        u_seed: cfg.seed,
        result: Outcome::ModelViolation,
        residual: f64::NAN,
        samples: cfg.samples,
        details: json!({ "error": e.to_string() }),
    }
}

pub fn cmd_verify(cfg: &RunConfig, task: &str, check: Check, stdout: &mut dyn Write) -> Result<Exit, Error> {
    let src = Source::load(input(cfg), cfg.d, cfg.m)?;
    let p = src.program();
    let us = oracles(p.oracle_dim(), cfg.samples, cfg.seed);
    let name = if task == "neutralise" {
        "neutralise"
    } else {
        match check {
            Check::Exact => "exact",
            Check::Eps => "eps",
            Check::Clean => "clean",
            Check::Homogeneity => "homogeneity",
        }
    };
    let report = match verify_inner(&src, task, check, &us, cfg) {
        Ok(r) => r,
        Err(e @ Error::ModelViolation { .. }) => violation_report(name, cfg, &e),
        Err(e) => return Err(e),
    };
    let exit = match report.result {
        Outcome::Pass => Exit::Pass,
        Outcome::Fail => Exit::Fail,
        Outcome::ModelViolation => Exit::ModelViolation,
    };
    emit(&cfg.output, &pretty(&serde_json::to_value(&report)?), stdout)?;
    Ok(exit)
}

fn verdict(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn verify_inner(
    src: &Source,
    task: &str,
    check: Check,
    us: &[CMatrix],
    cfg: &RunConfig,
) -> Result<VerificationReport, Error> {
    let p = src.program();
    let report = |check: &str, pass: bool, residual: f64, details: Value| VerificationReport {
        check: check.into(),
        u_seed: cfg.seed,
        result: verdict(pass),
        residual,
        samples: us.len(),
        details,
    };
    if task == "neutralise" {
        let r = check_neutralises(p, us, cfg.tol)?;
        let residual = r.residuals.iter().copied().fold(0.0, f64::max);
        return Ok(report("neutralise", r.pass, residual, serde_json::to_value(&r)?));
    }
    let t = src.task(task, cfg.m)?;
    Ok(match check {
        Check::Exact => {
            let results = us.par_iter().map(|u| check_exact(p, &t, u, cfg.tol)).collect::<Result<Vec<_>, _>>()?;
            let residual = results.iter().map(|r| r.residual).fold(0.0, f64::max);
            let second = results.iter().map(|r| r.second_singular).fold(0.0, f64::max);
            let failures: Vec<Value> = results
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.achieved)
                .take(5)
                .map(|(i, r)| {
                    let why = if r.second_singular > cfg.tol {
                        "rank-deficiency: garbage depends on the input"
                    } else {
                        "target mismatch"
                    };
                    json!({"index": i, "second_singular": r.second_singular, "residual": r.residual, "diagnostic": why})
                })
                .collect();
            let probs: Vec<f64> = results.iter().map(|r| r.success_prob).collect();
            report(
                "exact",
                failures.is_empty(),
                residual,
                json!({
                    "task": t.label(),
                    "max_second_singular": second,
                    "success_prob_min": probs.iter().copied().fold(f64::INFINITY, f64::min),
                    "success_prob_max": probs.iter().copied().fold(0.0, f64::max),
                    "phases": results.iter().map(|r| r.phase).collect::<Vec<_>>(),
                    "failures": failures,
                }),
            )
        }
        Check::Eps => {
            let eps = us
                .par_iter()
                .enumerate()
                .map(|(i, u)| eps_distance_estimate(p, &t, u, 8, cfg.seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>, _>>()?;
            let worst = eps.iter().copied().fold(0.0, f64::max);
            report("eps", worst <= cfg.tol, worst, json!({"task": t.label(), "eps": eps}))
        }
        Check::Clean => {
            let r = check_clean(p, &t, us, cfg.tol)?;
            report("clean", r.clean, r.misalignment.max(r.norm_spread), serde_json::to_value(&r)?)
        }
        Check::Homogeneity => {
            let delta = match (cfg.m, src) {
                (Some(m), _) => m,
                (None, Source::Circuit(a)) => a.static_degree(),
                (None, Source::Root(_)) => {
                    return Err(Error::InvalidArgument("homogeneity of root-composed needs --m".into()))
                }
            };
            let mut worst = 0.0f64;
            for (i, u) in us.iter().enumerate() {
                for lambda in random_phases(10, cfg.seed.wrapping_add(i as u64)) {
                    worst = worst.max(numeric_homogeneity_check(p, u, lambda, delta)?);
                }
            }
            report("homogeneity", worst <= cfg.tol, worst, json!({"task": t.label(), "degree": delta}))
        }
    })
}

pub fn cmd_probe(cfg: &RunConfig, opts: &ProbeOptions, stdout: &mut dyn Write) -> Result<Exit, Error> {
    let src = Source::load(input(cfg), cfg.d, cfg.m)?;
    let p = src.program();
    let d = p.oracle_dim();
    let m = cfg.m.unwrap_or(d as i32);
    let rep = dichotomy_probe(p, m, d, cfg.k, opts)?;
    let mut summary = rep.summary_json();
    summary["K"] = json!(rep.central.k);
    summary["consistent"] = json!(rep.consistent);
    summary["break_at"] = json!(rep.break_at);
    summary["generator"] = serde_json::to_value(&rep.generator)?;
    if let Some(path) = &cfg.output {
        std::fs::write(path, rep.central.trace.to_csv())?;
        if let Some(g) = &rep.generator {
            std::fs::write(generator_path(path), g.trace.to_csv())?;
        }
    }
    stdout.write_all(pretty(&summary).as_bytes())?;
    Ok(if rep.consistent { Exit::Pass } else { Exit::Fail })
}

/// `trace.csv` → `trace.generator.csv`.
pub fn generator_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.generator.csv"))
}

pub fn cmd_bu_scan(cfg: &RunConfig, points: usize, stdout: &mut dyn Write) -> Result<Exit, Error> {
    let grid = SphereGrid::with_at_least(points)?;
    let scan = match &cfg.input {
        None => bu_scan(&|u: &CMatrix| Ok(u[(0, 0)]), cfg.d, &grid)?,
        Some(spec) => {
            let src = Source::load(spec, cfg.d, cfg.m)?;
            let p = src.program();
            let m = cfg.m.unwrap_or(1);
            bu_scan(&|u: &CMatrix| extract_h(p, u, m), p.oracle_dim(), &grid)?
        }
    };
    let mut v = serde_json::to_value(&scan)?;
    v["resolution"] = json!(grid.resolution());
    emit(&cfg.output, &pretty(&v), stdout)?;
    Ok(Exit::Pass)
}

pub const SWEEP_HEADER: &str = "t,residual,phase,success_prob,eps";

pub fn cmd_sweep(
    cfg: &RunConfig,
    task: &str,
    grid: Grid,
    points: usize,
    stdout: &mut dyn Write,
) -> Result<Exit, Error> {
    let src = Source::load(input(cfg), cfg.d, cfg.m)?;
    let p = src.program();
    let d = p.oracle_dim();
    let t = src.task(task, cfg.m)?;
    let n_in = p.layout().dim_of(p.input_register());
    let rows = (0..points)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / points as f64;
            let u = match grid {
                Grid::Central => LoopKind::Central.point(d, s),
                Grid::Theta => {
                    let mut e = vec![C64::new(1.0, 0.0); d];
                    e[d - 1] = C64::from_polar(1.0, std::f64::consts::TAU * s);
                    CMatrix::diag(&e)
                }
            };
            let r = check_exact(p, &t, &u, cfg.tol)?;
            let mut zero = vec![ZERO; n_in];
            zero[0] = C64::new(1.0, 0.0);
            let prob = success_prob(p, &u, &zero)?;
            let eps = eps_distance_estimate(p, &t, &u, 2, cfg.seed)?;
            Ok((s, r.residual, r.phase.unwrap_or(f64::NAN), prob, eps))
        })
        .collect::<Result<Vec<_>, Error>>();
    let rows = match rows {
        Ok(r) => r,
        Err(e @ Error::ModelViolation { .. }) => {
            eprintln!("{e}");
            return Ok(Exit::ModelViolation);
        }
        Err(e) => return Err(e),
    };
    let mut csv = format!("{SWEEP_HEADER}\n");
    for (s, res, phase, prob, eps) in rows {
        let _ = writeln!(csv, "{s},{res},{phase},{prob},{eps}");
    }
    emit(&cfg.output, &csv, stdout)?;
    Ok(Exit::Pass)
}

/// Sizes the global pool from `UCTRL_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("UCTRL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
