use ckit::fit::{fit_trace, Model};
use ckit::{run_experiment, ExperimentConfig};
use ckit_core::TraceRow;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text).unwrap()
}

fn numbers(row: &TraceRow) -> (u64, u64, Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    (
        row.index,
        row.sfo_calls,
        row.primal_gap,
        row.dist_primal_sq,
        row.dist_dual_sq,
        row.composite_gap,
    )
}

#[test]
fn noiseless_runs_give_identical_traces() {
    let cfg = config(
        r#"{"problem": {"kind": "quadratic", "d": 6, "L": 10, "mu": 0, "seed": 2},
            "algorithm": {"name": "catalyst_sgd", "outer_iters": 15}, "seeds": 3}"#,
    );
    let trace = run_experiment(&cfg, None).unwrap();
    let runs: Vec<Vec<_>> = (0..3)
        .map(|id| trace.rows.iter().filter(|r| r.run_id == id).map(numbers).collect())
        .collect();
    assert_eq!(runs[0].len(), 16);
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn smooth_recipe_spends_eight_calls_per_outer_iteration() {
    let cfg = config(
        r#"{"problem": {"kind": "quadratic", "d": 10, "L": 50, "mu": 0, "seed": 8},
            "algorithm": {"name": "catalyst_sgd", "epsilon": 0.05}}"#,
    );
    let trace = run_experiment(&cfg, Some(1)).unwrap();
    assert!(trace.len() > 10);
    for row in &trace.rows {
        assert_eq!(row.sfo_calls, 8 * row.index);
    }
}

#[test]
fn reg_contracts_by_the_linear_factor_each_step() {
    let cfg = config(
        r#"{"problem": {"kind": "saddle", "dx": 4, "dy": 6, "L": 20, "mu_p": 2, "mu_d": 2, "seed": 12},
            "algorithm": {"name": "reg", "steps": 200}}"#,
    );
    let trace = run_experiment(&cfg, Some(1)).unwrap();
    let factor = 1.0 / (1.0 + 2.0 / 20.0);
    for w in trace.rows.windows(2) {
        let ratio = w[1].dist_primal_sq.unwrap() / w[0].dist_primal_sq.unwrap();
        assert!(
            ratio <= factor * (1.0 + 1e-6),
            "step {}: {ratio} > {factor}",
            w[1].index
        );
    }
}

#[test]
fn noiseless_catalyst_decays_at_least_quadratically() {
    let cfg = config(
        r#"{"problem": {"kind": "quadratic", "d": 20, "L": 100, "mu": 0, "seed": 4},
            "algorithm": {"name": "catalyst_sgd", "outer_iters": 60}}"#,
    );
    let trace = run_experiment(&cfg, Some(1)).unwrap();
    let fit = fit_trace(&trace.rows, Model::Power).unwrap();
    assert!(fit.rate <= -1.9, "exponent {}", fit.rate);
}

#[test]
fn restarted_minimax_fits_a_geometric_rate() {
    let cfg = config(
        r#"{"problem": {"kind": "saddle", "dx": 3, "dy": 3, "L": 4, "mu_p": 0.25, "mu_d": 1, "seed": 3},
            "algorithm": {"name": "r_catalyst_minimax_det", "epochs": 12}}"#,
    );
    let trace = run_experiment(&cfg, Some(1)).unwrap();
    match fit_trace(&trace.rows, Model::Geometric) {
        Ok(fit) => assert!(fit.rate <= 0.5, "factor {}", fit.rate),
        Err(ckit::BenchError::InsufficientData { .. }) => {
            // converged to exact zero before ten positive rows
        }
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn every_algorithm_runs_on_its_problem_kind() {
    let quad = r#"{"kind": "quadratic", "d": 5, "L": 10, "mu": 1, "sigma": 0.3, "seed": 1}"#;
    let saddle =
        r#"{"kind": "saddle", "dx": 2, "dy": 2, "L": 3, "mu_p": 1, "mu_d": 1, "sigma": 0.2, "seed": 1, "scale": 10}"#;
    let cases = [
        (quad, r#"{"name": "catalyst_sgd", "epsilon": 0.5}"#),
        (quad, r#"{"name": "r_catalyst_sgd", "epochs": 3}"#),
        (quad, r#"{"name": "exact_prox_baseline", "outer_iters": 10}"#),
        (saddle, r#"{"name": "reg", "steps": 20}"#),
        (saddle, r#"{"name": "sreg", "steps": 20}"#),
        (saddle, r#"{"name": "sreg_restarted", "epsilon": 1}"#),
        (saddle, r#"{"name": "catalyst_minimax_det", "outer_iters": 5}"#),
        (saddle, r#"{"name": "r_catalyst_minimax_det", "epochs": 2}"#),
        (saddle, r#"{"name": "catalyst_minimax_stoch", "epsilon": 200}"#),
        (saddle, r#"{"name": "r_catalyst_minimax_stoch", "epochs": 1}"#),
    ];
    for (problem, algorithm) in cases {
        let cfg = config(&format!(
            r#"{{"problem": {problem}, "algorithm": {algorithm}, "seeds": 2}}"#
        ));
        let trace = run_experiment(&cfg, None).unwrap_or_else(|e| panic!("{algorithm}: {e}"));
        assert!(trace.len() >= 4, "{algorithm}");
        for id in 0..2 {
            let sfo: Vec<u64> = trace
                .rows
                .iter()
                .filter(|r| r.run_id == id)
                .map(|r| r.sfo_calls)
                .collect();
            assert!(sfo.windows(2).all(|w| w[0] <= w[1]), "{algorithm}");
        }
        for r in &trace.rows {
            let gap = r.composite_gap.or(r.primal_gap).unwrap();
            assert!(gap >= -1e-12, "{algorithm}: negative gap {gap}");
        }
    }
}

#[test]
fn sample_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 4);
}
