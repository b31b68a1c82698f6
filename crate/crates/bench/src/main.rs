use std::path::PathBuf;
use std::process::ExitCode;

use ckit::error::Result;
use ckit::fit::{fit_trace, Model};
use ckit::runner::{run_to_csv, threads_from_env};
use ckit::suites::{check_acceptance, suite_names};
use ckit::{csv_io, ExperimentConfig};
use clap::{Parser, Subcommand};

/// Catalyst experiment runner.
#[derive(Debug, Parser)]
#[command(name = "ckit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a JSON experiment config and write its trace as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory the CSV is written to (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's seed count.
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Fit a convergence rate to a trace CSV.
    Fit {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
    },
    /// Run an acceptance suite, or `all`.
    Accept {
        #[arg(long)]
        suite: String,
        /// Print every comparison, not only the verdict.
        #[arg(long)]
        verbose: bool,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out, seeds } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(n) = seeds {
                cfg.seeds = n;
            }
            let (trace, path) = run_to_csv(&cfg, out.as_deref(), threads_from_env()?)?;
            println!("wrote {} rows to {}", trace.len(), path.display());
            Ok(true)
        }
        Command::Fit { trace, model } => {
            let rows = csv_io::read_file(&trace)?;
            let fit = fit_trace(&rows, model)?;
            let name = match model {
                Model::Power => "exponent",
                Model::Geometric => "factor",
            };
            println!("{name} {:.6} residual {:.6e} rows {}", fit.rate, fit.residual, fit.rows);
            Ok(true)
        }
        Command::Accept { suite, verbose } => {
            let names = if suite == "all" {
                suite_names()
            } else {
                vec![suite.as_str()]
            };
            let mut all_passed = true;
            for name in names {
                let report = check_acceptance(name)?;
                if verbose {
                    print!("{report}");
                } else {
                    println!("{}", report.summary());
                }
                all_passed &= report.passed();
            }
            Ok(all_passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
