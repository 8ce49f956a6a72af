//! Command-line surface: `run`, `check-gradient` and `validate`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::load_config;
use crate::experiment::{self, default_fd_step, ExperimentError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "gltr",
    version,
    about = "Homotopy trust-region runs for binary control problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment and write its logs and field dumps.
    Run {
        config: PathBuf,
        /// Print a line per finished ε phase.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Compare the adjoint gradient with central finite differences.
    CheckGradient {
        config: PathBuf,
        #[arg(long, default_value_t = 5)]
        directions: usize,
        /// Finite-difference step; problem-dependent default.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parse and validate the configuration only.
    Validate { config: PathBuf },
}

fn fail(err: &mut impl Write, e: ExperimentError) -> u8 {
    let _ = writeln!(err, "error: {e}");
    match e.exit_code() {
        1 => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

/// Executes `cli`, returning the process exit code.
pub fn execute(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> u8 {
    let path = match &cli.command {
        Command::Run { config, .. } | Command::CheckGradient { config, .. } | Command::Validate { config } => config,
    };
    let cfg = match load_config(path) {
        Ok(cfg) => cfg,
        Err(e) => return fail(err, e.into()),
    };
    match cli.command {
        Command::Validate { .. } => {
            let _ = writeln!(out, "{}: ok", path.display());
            EXIT_OK
        }
        Command::CheckGradient {
            directions, step, seed, ..
        } => {
            let step = step.unwrap_or_else(|| default_fd_step(cfg.problem));
            match experiment::check_gradient(&cfg, directions, step, seed) {
                Ok(report) => {
                    for (i, e) in report.relative_errors.iter().enumerate() {
                        let _ = writeln!(out, "direction {i}: relative error {e:.3e}");
                    }
                    let _ = writeln!(out, "max relative error {:.3e}", report.max_error());
                    EXIT_OK
                }
                Err(e) => fail(err, e),
            }
        }
        Command::Run { verbose, .. } => {
            let dir = experiment::output_dir(&cfg);
            match experiment::run_experiment_in(&cfg, &dir, verbose) {
                Ok(o) => {
                    let r = &o.result;
                    let _ = writeln!(
                        out,
                        "{} iterations, {} phases, stopped: {}; output in {}",
                        r.records.len(),
                        r.phases.len(),
                        r.termination,
                        o.dir.display()
                    );
                    EXIT_OK
                }
                Err(e) => fail(err, e),
            }
        }
    }
}
