//! The `fpe` command line: catalog listing, tabulation of exact densities
//! and currents, and the verification suites.
//!
//! Exit codes are 0 when everything requested passed, 1 for usage and
//! validation errors, and 2 for runtime failures (including failed
//! thresholds). Settings resolve as flag, then `--config` file, then default.

pub mod catalog;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod suites;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpe_core::similarity::PhysicalPoint;

use crate::catalog::{build, families, Entry};
use crate::config::{parse_param, FileConfig, DEFAULT_SEED, DEFAULT_WORKERS};
use crate::error::CliError;
use crate::output::{sig, write_atomic};
use crate::report::{array_lines, Report, Suite};
use crate::suites::{mc_config, SuiteOptions, DEFAULT_MC_PATHS, REPORT_MC_PATHS};

/// Significant digits in CSV output.
pub const CSV_DIGITS: usize = 15;
const MAX_ROWS: usize = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "fpe", version, about = "Exact similarity solutions of Fokker-Planck equations and their verification")]
pub struct Cli {
    /// key=value file with defaults for seed, workers, paths, dt, cells,
    /// family and param.<name>.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the family catalog with parameters and constraints.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Write x,t,z,W_exact,J_exact rows as CSV.
    Tabulate(TabulateArgs),
    /// Run one verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Run every suite on every family and print a JSON array.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter, repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Monte Carlo path count.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Time step for the PDE or Monte Carlo run.
    #[arg(long)]
    pub dt: Option<f64>,
    /// PDE grid cells.
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long)]
    pub x_step: f64,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Pde,
    Mc,
    Residual,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: SuiteArg,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Every catalog family with default parameters.
    #[arg(long, conflicts_with = "family")]
    pub all: bool,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fpe: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::List { json } => {
            print!("{}", list_text(json));
            Ok(0)
        }
        Command::Tabulate(args) => {
            let entry = resolve_entry(&file, &args.family)?;
            let csv = tabulate(&entry, args.x_min, args.x_max, args.x_step, &args.times)?;
            emit(args.out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let entry = resolve_entry(&file, &args.family)?;
            let opts = suite_options(&file, &args.run)?;
            let suite = match args.suite {
                SuiteArg::Pde => Suite::Pde,
                SuiteArg::Mc => Suite::Mc,
                SuiteArg::Residual => Suite::Residual,
            };
            if suite == Suite::Mc {
                mc_config(&entry, &opts, DEFAULT_MC_PATHS).validate()?;
            }
            let report = suites::run(&entry, suite, &opts, DEFAULT_MC_PATHS);
            emit(args.out.as_deref(), &format!("{}\n", report.to_line()))?;
            Ok(report_code(std::slice::from_ref(&report)))
        }
        Command::Report(args) => {
            let opts = suite_options(&file, &args.run)?;
            let entries: Vec<Entry> = if args.all {
                families()
                    .iter()
                    .map(|f| build(f.name, &BTreeMap::new()))
                    .collect::<Result<_, _>>()?
            } else if args.family.family.is_some() || file.values.contains_key("family") {
                vec![resolve_entry(&file, &args.family)?]
            } else {
                return Err(CliError::Usage("report needs --all or --family".into()));
            };
            for e in &entries {
                mc_config(e, &opts, REPORT_MC_PATHS).validate()?;
            }
            let mut reports: Vec<Report> = Vec::with_capacity(entries.len());
            for e in &entries {
                let r = suites::run(e, Suite::All, &opts, REPORT_MC_PATHS);
                eprintln!("{:<12} {}", e.family, if r.pass { "pass" } else { "FAIL" });
                reports.push(r);
            }
            emit(args.out.as_deref(), &array_lines(&reports))?;
            Ok(report_code(&reports))
        }
    }
}

fn report_code(reports: &[Report]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        2
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn resolve_entry(file: &FileConfig, args: &FamilyArgs) -> Result<Entry, CliError> {
    let name = args
        .family
        .clone()
        .or_else(|| file.values.get("family").cloned())
        .ok_or_else(|| CliError::Usage("--family is required".into()))?;
    let flags: BTreeMap<String, String> = args.params.iter().cloned().collect();
    build(&name, &file.merged_params(&flags))
}

fn suite_options(file: &FileConfig, run: &RunArgs) -> Result<SuiteOptions, CliError> {
    let workers = file.pick(run.workers, "workers")?.unwrap_or(DEFAULT_WORKERS);
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    Ok(SuiteOptions {
        seed: file.pick(run.seed, "seed")?.unwrap_or(DEFAULT_SEED),
        workers,
        paths: file.pick(run.paths, "paths")?,
        dt: file.pick(run.dt, "dt")?,
        cells: file.pick(run.cells, "cells")?,
    })
}

/// The catalog as text, or as a JSON array with `json`.
pub fn list_text(json: bool) -> String {
    let fams = families();
    if json {
        return format!("{}\n", serde_json::to_string_pretty(&fams).expect("catalog serializes"));
    }
    let mut s = String::new();
    let mut group = "";
    for f in &fams {
        if f.group != group {
            group = f.group;
            let _ = writeln!(s, "{group}");
        }
        let _ = writeln!(s, "  {:<12} {}", f.name, f.summary);
        let params: Vec<String> = f.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
        let _ = writeln!(s, "    params: {}", if params.is_empty() { "(none)".into() } else { params.join(" ") });
        let _ = writeln!(s, "    constraints: {}", f.constraints);
        let _ = writeln!(s, "    domain: {}", f.domain);
        if let Some(note) = f.note {
            let _ = writeln!(s, "    note: {note}");
        }
    }
    s
}

/// CSV of `x,t,z,W_exact,J_exact` on the grid `x_min + i·x_step` for each
/// time, keeping only points inside the support at that time.
pub fn tabulate(entry: &Entry, x_min: f64, x_max: f64, x_step: f64, times: &[f64]) -> Result<String, CliError> {
    if !(x_step > 0.0 && x_step.is_finite()) {
        return Err(CliError::Usage("--x-step must be positive".into()));
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_max >= x_min) {
        return Err(CliError::Usage("need finite --x-min <= --x-max".into()));
    }
    if let Some(t) = times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(CliError::Usage(format!("times must be positive, got {t}")));
    }
    let n = ((x_max - x_min) / x_step + 1e-9).floor() as usize + 1;
    if n.saturating_mul(times.len()) > MAX_ROWS {
        return Err(CliError::Usage(format!("more than {MAX_ROWS} rows requested")));
    }
    let sol = &entry.solution;
    let mut out = String::from("x,t,z,W_exact,J_exact\n");
    for &t in times {
        let (a, b) = sol.physical_support(t);
        let s = t.powf(sol.alpha());
        for i in 0..n {
            let x = x_min + i as f64 * x_step;
            if x < a || x > b {
                continue;
            }
            let p = PhysicalPoint::new(x, t)?;
            let w = sol.pdf(&p).map_err(|e| CliError::Runtime(e.to_string()))?;
            let j = sol.probability_current(&p).map_err(|e| CliError::Runtime(e.to_string()))?;
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                sig(x, CSV_DIGITS),
                sig(t, CSV_DIGITS),
                sig(x / s, CSV_DIGITS),
                sig(w, CSV_DIGITS),
                sig(j, CSV_DIGITS)
            );
        }
    }
    Ok(out)
}
