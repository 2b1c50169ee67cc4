//! Command-line grammar. Every subcommand's arguments serialize into the run's config hash.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "stablab", version, about = "Numerical laboratory for stable solutions of -Δu = λf(u)")]
pub struct Cli {
    /// key=value file; each key is a long flag name, and flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Continue the radial solution branch in the centre value and write it as CSV.
    Branch(BranchArgs),
    /// First eigenvalue of the linearized operator at one branch row.
    Stability(StabilityArgs),
    /// One interior estimate on a branch row, a fresh solution, or −2 ln r.
    Check(CheckArgs),
    /// The interior or boundary suite with refinement drift.
    CheckAll(CheckAllArgs),
    /// Minimal solution on the half disk.
    Bsolve(BsolveArgs),
    /// One boundary estimate on a field written by `bsolve`.
    Bcheck(BcheckArgs),
    /// Randomized inequality sweep.
    Suite(SuiteArgs),
    /// Explicit counterexamples.
    Counterexample(CounterexampleArgs),
    /// Collects the pass flags of earlier outputs into one table.
    Report(ReportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BranchArgs {
    #[arg(long)]
    pub dim: usize,
    /// exp, exp:SCALE, power:P, mems, linear:SLOPE, doubleexp, table:FILE.
    #[arg(long, default_value = "exp")]
    pub nl: String,
    #[arg(long, default_value_t = 12.0)]
    pub smax: f64,
    #[arg(long, default_value_t = 24)]
    pub steps: usize,
    #[arg(long, default_value_t = 1024)]
    pub nodes: usize,
    #[arg(long, default_value = "branch.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct StabilityArgs {
    #[arg(long)]
    pub branch: PathBuf,
    #[arg(long)]
    pub index: usize,
    /// Also write the report here; stdout always gets it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    /// Interior registry id, e.g. weighted_by_gradient.
    #[arg(long)]
    pub estimate: String,
    /// Branch CSV written by `branch`; pairs with --index.
    #[arg(long, requires = "index", conflicts_with_all = ["dim", "singular"])]
    pub branch: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<usize>,
    /// Solve afresh in this dimension, or place −2 ln r in it with --singular.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value = "exp")]
    pub nl: String,
    /// Centre value of the fresh solution.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1024)]
    pub nodes: usize,
    /// Check u = −2 ln r on a geometric mesh instead of a solution.
    #[arg(long, requires = "dim")]
    pub singular: bool,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub shift_k: Option<f64>,
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Interior,
    Boundary,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckAllArgs {
    #[arg(long, value_enum, default_value = "interior")]
    pub suite: SuiteKind,
    /// Interior: comma-separated dimensions.
    #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5, 6, 7, 8, 9])]
    pub dims: Vec<usize>,
    /// Interior: comma-separated nonlinearities.
    #[arg(long, value_delimiter = ',', default_values_t = ["exp".to_string(), "power:2".to_string(), "power:3".to_string()])]
    pub nls: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pub points: usize,
    #[arg(long, default_value_t = 1024)]
    pub nodes: usize,
    #[arg(long, default_value_t = 24)]
    pub steps: usize,
    /// Boundary: polar grid NR,NPHI.
    #[arg(long, value_parser = parse_grid, default_value = "256,128")]
    pub grid: (usize, usize),
    /// Boundary: nonlinearity.
    #[arg(long, default_value = "exp")]
    pub nl: String,
    /// Largest relative change of a constant under refinement.
    #[arg(long, default_value_t = 0.05)]
    pub max_drift: f64,
    #[arg(long, default_value = "suite.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BsolveArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value = "exp")]
    pub nl: String,
    #[arg(long, value_parser = parse_grid, default_value = "256,128")]
    pub grid: (usize, usize),
    #[arg(long, default_value = "field.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BcheckArgs {
    /// Boundary registry id, e.g. pohozaev_flux.
    #[arg(long)]
    pub estimate: String,
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SuiteArgs {
    /// appendix-a, appendix-b, appendix-c, harmonic or superharmonic.
    #[arg(long)]
    pub group: String,
    /// Defaults to 1000, or 200 for superharmonic.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "suite.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Counterexample {
    #[value(name = "remark81")]
    #[serde(rename = "remark81")]
    Remark81,
    #[value(name = "appendixE")]
    #[serde(rename = "appendixE")]
    AppendixE,
}

#[derive(Debug, Args, Serialize)]
pub struct CounterexampleArgs {
    #[arg(long, value_enum)]
    pub which: Counterexample,
    /// remark81: the family parameter in [0, 1].
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// 2 or 3 for remark81 (default 2), at least 3 for appendixE (default 3).
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value = "counterexample.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// JSON outputs of earlier runs.
    #[arg(long, num_args = 1.., value_name = "FILE")]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "summary.json")]
    pub out: PathBuf,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("grid must be NR,NPHI, got {s:?}"))?;
    let nr = a.trim().parse().map_err(|_| format!("bad NR in {s:?}"))?;
    let nphi = b.trim().parse().map_err(|_| format!("bad NPHI in {s:?}"))?;
    Ok((nr, nphi))
}

impl Command {
    /// Primary output path, next to which the manifest goes.
    #[must_use]
    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Branch(a) => Some(&a.out),
            Command::Stability(a) => a.out.as_ref(),
            Command::Check(a) => Some(&a.out),
            Command::CheckAll(a) => Some(&a.out),
            Command::Bsolve(a) => Some(&a.out),
            Command::Bcheck(a) => Some(&a.out),
            Command::Suite(a) => Some(&a.out),
            Command::Counterexample(a) => Some(&a.out),
            Command::Report(a) => Some(&a.out),
        }
    }
}
