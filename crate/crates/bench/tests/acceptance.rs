//! Runs every acceptance criterion and prints one verdict line per criterion.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;

use ckit::suites::{check_acceptance, suite_names};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (i, name) in suite_names().into_iter().enumerate() {
        let report = check_acceptance(name).expect("listed suite");
        println!("criterion {}: {}", i + 1, report.summary());
        if !report.passed() {
            for c in report.checks.iter().filter(|c| !c.passed()) {
                println!("    {c}");
            }
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
