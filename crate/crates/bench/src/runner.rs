//! Builds instances and recipes from a config and executes seed batches.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ckit_core::catalyst_minimax::composite_metrics;
use ckit_core::linalg;
use ckit_core::subsolvers::{reg, sreg, sreg_restarted, Stepsize};
use ckit_core::testbed::{gen_saddle_with, SaddleParams};
use ckit_core::{
    catalyst_minimax_run, catalyst_run, catalyst_run_exact, gen_quadratic, r_catalyst_minimax_run, r_catalyst_run,
    recipe_det, recipe_smooth, recipe_stoch, recipe_strongly_convex, restarted_det, restarted_stoch, Horizon,
    MinRecipe, MinReference, MinimaxReference, OracleStream, Point, PrimalDualPoint, QuadraticInstance,
    RestartedMinRecipe, RunTrace, SaddleInstance, SaddleObjective, SmoothObjective, TraceRow,
};
use rayon::prelude::*;

use crate::config::{AlgorithmSpec, ExperimentConfig, ProblemSpec};
use crate::csv_io;
use crate::error::{BenchError, Result};

/// Environment variable capping run-level parallelism.
pub const THREADS_ENV: &str = "CKIT_THREADS";

/// A generated testbed instance.
#[derive(Debug, Clone)]
pub enum Testbed {
    Quadratic(QuadraticInstance<f64>),
    Saddle(SaddleInstance<f64>),
}

pub fn build_instance(spec: &ProblemSpec) -> Result<Testbed> {
    Ok(match *spec {
        ProblemSpec::Quadratic {
            d,
            lipschitz,
            mu,
            sigma,
            seed,
        } => Testbed::Quadratic(gen_quadratic(d, lipschitz, mu, seed)?.with_noise(sigma)?),
        ProblemSpec::Saddle {
            dx,
            dy,
            lipschitz,
            mu_p,
            mu_d,
            sigma,
            seed,
            scale,
        } => {
            let params = SaddleParams {
                scale,
                ..SaddleParams::new(dx, dy, lipschitz, mu_p, mu_d)
            };
            Testbed::Saddle(gen_saddle_with(params, seed)?.with_noise(sigma)?)
        }
    })
}

/// `f(x₀) − f*` at the quadratic's default start.
pub fn quadratic_initial_gap(q: &QuadraticInstance<f64>) -> f64 {
    q.value(&q.default_start()) - q.optimal_value()
}

/// `2μ_d‖x* − x₀‖² + μ_d‖ỹ*(x₀) − y₀‖²` at `z0`.
pub fn minimax_potential(s: &SaddleInstance<f64>, z0: &PrimalDualPoint<f64>) -> Result<f64> {
    let md = s.dual_modulus();
    let dy = linalg::dist_sq(&s.inner_argmax(z0.x())?, z0.y());
    Ok(2.0 * md * linalg::dist_sq(s.saddle_point().0, z0.x()) + md * dy)
}

/// Composite metric `f(x₀) − f* + w‖ỹ*(x₀) − y₀‖²`.
pub fn composite_at(s: &SaddleInstance<f64>, z: &PrimalDualPoint<f64>, weight: f64) -> Result<f64> {
    let mut row = TraceRow::new(0, 0, 0);
    composite_metrics(&mut row, s, z.x(), z.y(), weight)?;
    Ok(row.composite_gap.unwrap_or(f64::NAN))
}

fn stacked_dist_sq(s: &SaddleInstance<f64>, z: &PrimalDualPoint<f64>) -> f64 {
    let (x, y) = s.saddle_point();
    linalg::dist_sq(x, z.x()) + linalg::dist_sq(y, z.y())
}

fn extragradient_row(
    s: &SaddleInstance<f64>,
    z: &PrimalDualPoint<f64>,
    seed: u64,
    t: usize,
    clock: &Instant,
) -> TraceRow {
    let mut row = TraceRow::new(seed, t as u64, 2 * t as u64);
    row.primal_gap = Some(s.primal_value(z.x()) - s.optimal_value());
    row.dist_primal_sq = Some(stacked_dist_sq(s, z));
    row.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    row
}

/// REG (or SREG when `stream` is set) advanced one step at a time so that row
/// `t` describes the last iterate `z_t`.
fn extragradient_trace(
    s: &SaddleInstance<f64>,
    mu: f64,
    steps: usize,
    schedule: Stepsize<f64>,
    mut stream: Option<&mut OracleStream>,
    seed: u64,
) -> Result<RunTrace> {
    let clock = Instant::now();
    let mut z = s.default_start();
    let mut trace = RunTrace::default();
    trace.push(extragradient_row(s, &z, seed, 0, &clock));
    for t in 0..steps {
        let step = match schedule {
            Stepsize::Constant(_) => schedule,
            Stepsize::Decaying { mu, offset } => Stepsize::Decaying { mu, offset: offset + t },
        };
        let out = match stream.as_deref_mut() {
            Some(st) => sreg(s, mu, &z, 1, step, st)?,
            None => reg(s, mu, &z, 1, step)?,
        };
        z = out.last;
        trace.push(extragradient_row(s, &z, seed, t + 1, &clock));
    }
    Ok(trace)
}

fn default_mu(s: &SaddleInstance<f64>) -> f64 {
    s.primal_modulus().min(s.dual_modulus())
}

fn run_quadratic(q: &QuadraticInstance<f64>, alg: &AlgorithmSpec, stream: &mut OracleStream) -> Result<RunTrace> {
    let x0 = Point::new(q.default_start())?;
    let l = q.smoothness();
    let sigma = q.noise();
    let run = match *alg {
        AlgorithmSpec::CatalystSgd {
            epsilon,
            outer_iters,
            inner_steps,
            dist_sq,
        } => {
            let d0 = dist_sq.unwrap_or_else(|| x0.dist_sq(q.minimizer()));
            let mut recipe = match epsilon {
                Some(eps) => recipe_smooth(l, eps, sigma, d0)?,
                None => MinRecipe::new(l, 0.0, outer_iters.unwrap_or(1), inner_steps.unwrap_or(8))?,
            };
            if let Some(k) = outer_iters {
                recipe.outer_iters = k;
            }
            if let Some(t) = inner_steps {
                recipe.inner_steps = t;
            }
            catalyst_run(q, &recipe, &x0, stream, Some(q))?
        }
        AlgorithmSpec::RCatalystSgd {
            epsilon,
            epochs,
            initial_gap,
        } => {
            let gap = initial_gap.unwrap_or_else(|| quadratic_initial_gap(q));
            let mu = q.strong_convexity();
            let recipe = match (epochs, epsilon) {
                (Some(e), _) => RestartedMinRecipe::with_epochs(l, mu, e, sigma, gap)?,
                (None, Some(eps)) => recipe_strongly_convex(l, mu, eps, sigma, gap)?,
                (None, None) => unreachable!("validated config"),
            };
            r_catalyst_run(q, &recipe, &x0, stream, Some(q))?
        }
        AlgorithmSpec::ExactProxBaseline { outer_iters } => {
            let recipe = MinRecipe::new(l, 0.0, outer_iters, 8)?;
            catalyst_run_exact(q, &recipe, &x0, Some(q))?
        }
        _ => unreachable!("validated config"),
    };
    Ok(run.trace)
}

fn run_saddle(s: &SaddleInstance<f64>, alg: &AlgorithmSpec, stream: &mut OracleStream) -> Result<RunTrace> {
    let z0 = s.default_start();
    let l = s.lipschitz();
    let seed = stream.seed();
    let run = match *alg {
        AlgorithmSpec::Reg { steps, mu, eta } => {
            let mu = mu.unwrap_or_else(|| default_mu(s));
            let eta = eta.unwrap_or(1.0 / l);
            return extragradient_trace(s, mu, steps, Stepsize::Constant(eta), None, seed);
        }
        AlgorithmSpec::Sreg { steps, mu } => {
            let mu = mu.unwrap_or_else(|| default_mu(s));
            return extragradient_trace(s, mu, steps, Stepsize::sreg_default(mu, l), Some(stream), seed);
        }
        AlgorithmSpec::SregRestarted { epsilon, mu, r_sq } => {
            let clock = Instant::now();
            let mu = mu.unwrap_or_else(|| default_mu(s));
            let r_sq = r_sq.unwrap_or_else(|| stacked_dist_sq(s, &z0));
            let solve = sreg_restarted(s, mu, &z0, epsilon, r_sq, stream)?;
            let mut trace = RunTrace::default();
            trace.push(extragradient_row(s, &z0, seed, 0, &clock));
            let mut sfo = 0;
            for (e, (z, &steps)) in solve.epoch_ends.iter().zip(&solve.plan.epoch_steps).enumerate() {
                sfo += 2 * steps as u64;
                let mut row = extragradient_row(s, z, seed, e + 1, &clock);
                row.sfo_calls = sfo;
                trace.push(row);
            }
            return Ok(trace);
        }
        AlgorithmSpec::CatalystMinimaxDet {
            outer_iters,
            epsilon,
            potential,
            gap_ratio,
        } => {
            let horizon = match (outer_iters, epsilon) {
                (Some(k), _) => Horizon::Iterations(k),
                (None, Some(eps)) => Horizon::Accuracy {
                    epsilon: eps,
                    potential: potential.map_or_else(|| minimax_potential(s, &z0), Ok)?,
                },
                (None, None) => unreachable!("validated config"),
            };
            let recipe = recipe_det(s, horizon, gap_ratio)?;
            catalyst_minimax_run(s, &recipe, &z0, stream, Some(s))?
        }
        AlgorithmSpec::RCatalystMinimaxDet { epochs } => {
            let recipe = restarted_det(s, epochs)?;
            r_catalyst_minimax_run(s, &recipe, &z0, stream, Some(s))?
        }
        AlgorithmSpec::CatalystMinimaxStoch {
            epsilon,
            potential,
            gap_ratio,
        } => {
            let potential = potential.map_or_else(|| minimax_potential(s, &z0), Ok)?;
            let recipe = recipe_stoch(s, epsilon, potential, gap_ratio)?;
            catalyst_minimax_run(s, &recipe, &z0, stream, Some(s))?
        }
        AlgorithmSpec::RCatalystMinimaxStoch {
            epsilon,
            epochs,
            initial_gap,
        } => {
            let weight = s.dual_modulus() / 12.0;
            let gap = initial_gap.map_or_else(|| composite_at(s, &z0, weight), Ok)?;
            let epochs = match (epochs, epsilon) {
                (Some(e), _) => e,
                (None, Some(eps)) => ckit_core::catalyst_minimax::epochs_for_accuracy(gap, eps)?,
                (None, None) => unreachable!("validated config"),
            };
            let recipe = restarted_stoch(s, epochs, gap)?;
            r_catalyst_minimax_run(s, &recipe, &z0, stream, Some(s))?
        }
        _ => unreachable!("validated config"),
    };
    Ok(run.trace)
}

/// Executes run `run_id` of the batch on a prebuilt instance. Each run draws
/// from its own oracle stream derived from the problem seed.
pub fn run_once(cfg: &ExperimentConfig, testbed: &Testbed, run_id: u64) -> Result<RunTrace> {
    let mut stream = OracleStream::for_run(cfg.problem.seed(), run_id);
    let trace = match testbed {
        Testbed::Quadratic(q) => run_quadratic(q, &cfg.algorithm, &mut stream)?,
        Testbed::Saddle(s) => run_saddle(s, &cfg.algorithm, &mut stream)?,
    };
    Ok(trace.with_run_id(run_id))
}

/// Reads the thread cap from `CKIT_THREADS`; unset means rayon's default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(BenchError::config(
                THREADS_ENV,
                format!("expected a positive integer, got `{v}`"),
            )),
        },
    }
}

/// Runs all seeds, at most `threads` at a time, and concatenates the traces
/// in run order.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RunTrace> {
    cfg.validate()?;
    let testbed = build_instance(&cfg.problem)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let traces: Vec<Result<RunTrace>> = pool.install(|| {
        (0..cfg.seeds as u64)
            .into_par_iter()
            .map(|id| run_once(cfg, &testbed, id))
            .collect()
    });
    let mut all = RunTrace::default();
    for trace in traces {
        all.rows.extend(trace?.rows);
    }
    Ok(all)
}

/// Where the CSV of `cfg` goes: its `output` (resolved against `out_dir`) or
/// `<out_dir>/<algorithm>.csv`.
pub fn output_path(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> PathBuf {
    let dir = out_dir.unwrap_or_else(|| Path::new("."));
    match &cfg.output {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => dir.join(p),
        None => dir.join(format!("{}.csv", cfg.algorithm.name())),
    }
}

/// [`run_experiment`] followed by a single CSV write.
pub fn run_to_csv(
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
    threads: Option<usize>,
) -> Result<(RunTrace, PathBuf)> {
    let trace = run_experiment(cfg, threads)?;
    let path = output_path(cfg, out_dir);
    csv_io::write_file(&trace.rows, &path)?;
    Ok((trace, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn saddle_cfg(alg: &str, seeds: usize, sigma: f64) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"problem": {{"kind": "saddle", "dx": 3, "dy": 3, "L": 10, "mu_p": 1, "mu_d": 1,
                 "sigma": {sigma}, "seed": 4}},
                "algorithm": {alg}, "seeds": {seeds}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn reg_trace_contracts_each_step() {
        let cfg = saddle_cfg(r#"{"name": "reg", "steps": 50}"#, 1, 0.0);
        let trace = run_experiment(&cfg, Some(1)).unwrap();
        assert_eq!(trace.len(), 51);
        let rate = 1.0 / (1.0 + 1.0 / 10.0);
        for w in trace.rows.windows(2) {
            let (a, b) = (w[0].dist_primal_sq.unwrap(), w[1].dist_primal_sq.unwrap());
            assert!(b <= rate * a * (1.0 + 1e-6), "{b} > {rate} * {a}");
        }
        assert_eq!(trace.rows[50].sfo_calls, 100);
    }

    #[test]
    fn chained_sreg_matches_a_single_call() {
        let cfg = saddle_cfg(r#"{"name": "sreg", "steps": 40}"#, 1, 0.5);
        let trace = run_experiment(&cfg, Some(1)).unwrap();
        let Testbed::Saddle(s) = build_instance(&cfg.problem).unwrap() else {
            unreachable!()
        };
        let mut stream = OracleStream::for_run(4, 0);
        let out = sreg(
            &s,
            1.0,
            &s.default_start(),
            40,
            Stepsize::sreg_default(1.0, 10.0),
            &mut stream,
        )
        .unwrap();
        assert_eq!(trace.rows[40].dist_primal_sq.unwrap(), stacked_dist_sq(&s, &out.last));
    }

    #[test]
    fn restarted_sreg_rows_follow_epochs() {
        let cfg = saddle_cfg(r#"{"name": "sreg_restarted", "epsilon": 0.01}"#, 1, 0.0);
        let trace = run_experiment(&cfg, None).unwrap();
        assert!(trace.len() > 2);
        assert!(trace.sfo_monotone());
    }

    #[test]
    fn thread_count_does_not_change_numbers() {
        let cfg = saddle_cfg(r#"{"name": "sreg", "steps": 30}"#, 6, 1.0);
        let strip = |t: RunTrace| -> Vec<TraceRow> {
            t.rows
                .into_iter()
                .map(|mut r| {
                    r.wall_ms = 0.0;
                    r
                })
                .collect()
        };
        let a = strip(run_experiment(&cfg, Some(1)).unwrap());
        let b = strip(run_experiment(&cfg, Some(4)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn output_path_resolution() {
        let mut cfg = saddle_cfg(r#"{"name": "reg", "steps": 5}"#, 1, 0.0);
        assert_eq!(output_path(&cfg, Some(Path::new("out"))), Path::new("out/reg.csv"));
        cfg.output = Some("a/b.csv".into());
        assert_eq!(output_path(&cfg, Some(Path::new("out"))), Path::new("out/a/b.csv"));
    }
}
