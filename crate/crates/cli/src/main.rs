//! `ctxprob`: named experiments over the contextual probability model,
//! emitting CSV or JSON artifacts.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or I/O error.

mod commands;
mod config;
mod error;
mod fmt;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{GlobalFlags, Settings};
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "ctxprob", version, about = "Contextual probability experiments: EPR-Bohm sweeps, CHSH, λ scans, frequency stabilization")]
struct Cli {
    #[command(flatten)]
    flags: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and sampled p_b(ij) and E over a grid of Δ = γ′ − γ
    EprSweep {
        /// Base analyzer angle γ
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
    },
    /// CHSH combination, closed form and sampled
    Chsh {
        /// "a,b,c,d" or "optimal"
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
    },
    /// Scale the EPR λ pattern by s and report regime, admissibility, E and S
    LambdaScan,
    /// Quadruple frequency that never settles next to observables that do
    FluctuationDemo {
        /// JSON Q_A/Q_B pair (built-in pair when absent)
        #[arg(long, value_name = "PATH")]
        pair: Option<PathBuf>,
        /// Target quadruple ijkl, e.g. 1112
        #[arg(long)]
        quadruple: Option<String>,
    },
    /// Check a model document
    Validate {
        #[arg(value_name = "MODEL")]
        model: Option<PathBuf>,
    },
    /// Sample a model document: frequencies, disturbance and λ̂
    Simulate {
        #[arg(value_name = "MODEL")]
        model: Option<PathBuf>,
        /// Also write the sampled source ensemble as CSV
        #[arg(long, value_name = "PATH")]
        ensemble: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<Option<String>> {
    let settings = Settings::resolve(&cli.flags)?;
    let report = match &cli.command {
        Command::EprSweep { gamma } => commands::epr_sweep(&settings, gamma.as_deref())?,
        Command::Chsh { angles } => commands::chsh_report(&settings, angles.as_deref())?,
        Command::LambdaScan => commands::lambda_scan(&settings)?,
        Command::FluctuationDemo { pair, quadruple } => {
            commands::fluctuation_demo(&settings, pair.as_deref(), quadruple.as_deref())?
        }
        Command::Validate { model } => commands::validate(&settings, model.as_deref())?,
        Command::Simulate { model, ensemble } => {
            commands::simulate(&settings, model.as_deref(), ensemble.as_deref())?
        }
    };
    match &settings.out {
        Some(path) => commands::write_file(path, &report.body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&report.body)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    Ok(report.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("ctxprob: {failure}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ctxprob: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
