//! The `stablab` command line: argument handling, dispatch, and report files.
//!
//! Exit codes: 0 when every requested check passes, 1 on usage errors (including unmet
//! hypotheses of an estimate), 2 when a check fails, 3 on internal errors.

pub mod args;
pub mod branch_table;
mod commands;
pub mod config;
pub mod output;

use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use output::Run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<stablab::Error> for Failure {
    /// Rejected inputs and unmet hypotheses are usage errors; numerical breakdowns are internal.
    fn from(e: stablab::Error) -> Self {
        use stablab::Error as E;
        match e {
            E::DimensionTooLow { .. }
            | E::DimensionOutOfRange { .. }
            | E::HypothesisViolated(_)
            | E::UnstableInput { .. }
            | E::NotApplicable { .. }
            | E::InvalidArgument(_)
            | E::InvalidMesh(_)
            | E::DomainOutsideMesh { .. }
            | E::MeshTooCoarse { .. }
            | E::NotSuperharmonic { .. }
            | E::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

/// Caps the global rayon pool at `STABLAB_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("STABLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::Usage(format!("STABLAB_THREADS must be a positive integer, got {v:?}")))?;
    // A second call in the same process finds the pool already built; the first cap stands.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command line and returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match config::merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("{e}");
        return e.exit_code();
    }
    let start = Instant::now();
    let mut run = match Run::new(argv, &cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let code = match commands::dispatch(&cli.command, &mut run) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    if let Some(out) = cli.command.out() {
        if run.has_outputs() {
            if let Err(e) = run.finish(out, start.elapsed().as_secs_f64(), code) {
                eprintln!("{e}");
                return EXIT_INTERNAL;
            }
        }
    }
    code
}
