//! Experiment harness for `ckit-core`: JSON configs, seed batches, CSV
//! traces, rate fits and the acceptance suites.

pub mod config;
pub mod csv_io;
pub mod error;
pub mod fit;
pub mod runner;
pub mod suites;

pub use config::{AlgorithmSpec, ExperimentConfig, ProblemSpec};
pub use error::{BenchError, Result};
pub use fit::{fit_points, fit_trace, Fit, Model};
pub use runner::{run_experiment, run_once, run_to_csv, Testbed};
pub use suites::{check_acceptance, suite_names, Check, SuiteReport, SUITES};
