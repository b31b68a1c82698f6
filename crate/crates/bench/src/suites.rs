//! Named acceptance suites. Each compares measured quantities against the
//! corresponding bound and reports every comparison.

use std::fmt;
use std::time::{Duration, Instant};

use ckit_core::linalg;
use ckit_core::objective::sample_grad;
use ckit_core::subsolvers::weights::{gamma_product, sgd_lambda, sgd_step_size};
use ckit_core::subsolvers::{reg, sgd_offset, sgd_prox, sreg, Stepsize};
use ckit_core::testbed::{gen_saddle_with, SaddleParams};
use ckit_core::{
    catalyst_minimax_run, catalyst_run, catalyst_run_exact, gen_quadratic, gen_saddle, r_catalyst_minimax_run,
    r_catalyst_run, recipe_det, recipe_smooth, restarted_det, restarted_stoch, ExactProx, FeasibleSet, Horizon,
    MinRecipe, MinReference, MinimaxReference, OracleStream, Point, PrimalDualPoint, ProxSubproblem,
    RestartedMinRecipe, SaddleInstance, SaddleObjective, SmoothObjective, TraceRow,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::csv_io;
use crate::error::{BenchError, Result};
use crate::runner::{composite_at, quadratic_initial_gap, run_experiment};

/// Suite names with their runtime limits.
pub const SUITES: [(&str, u64); 9] = [
    ("reg-linear-rate", 5),
    ("catalyst-smooth-bound", 10),
    ("r-catalyst-halving", 10),
    ("sgd-certificate", 60),
    ("sreg-contraction", 120),
    ("minimax-det-bound", 120),
    ("minimax-restart-halving", 120),
    ("minimax-stoch", 600),
    ("properties", 60),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// One comparison `measured ≤ slack · bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
}

impl Check {
    fn new(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::with_slack(label, measured, bound, 1.0)
    }

    fn with_slack(label: impl Into<String>, measured: f64, bound: f64, slack: f64) -> Self {
        Self {
            label: label.into(),
            measured,
            bound,
            slack,
        }
    }

    /// Counts of violations, which must be zero.
    fn count(label: impl Into<String>, violations: usize) -> Self {
        Self::new(label, violations as f64, 0.0)
    }

    pub fn passed(&self) -> bool {
        self.measured <= self.slack * self.bound
    }

    /// `measured / (slack · bound)`; below one means a pass with margin.
    pub fn ratio(&self) -> f64 {
        let allowed = self.slack * self.bound;
        if allowed == 0.0 {
            if self.measured <= 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.measured / allowed
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok  " } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: measured {:.6e} vs bound {:.6e}",
            self.label, self.measured, self.bound
        )?;
        if self.slack != 1.0 {
            write!(f, " x {}", self.slack)?;
        }
        write!(f, " (ratio {:.4})", self.ratio())
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
    /// Set when the suite could not run to completion.
    pub error: Option<String>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::passed) && self.within_time()
    }

    pub fn within_time(&self) -> bool {
        self.elapsed <= self.limit
    }

    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().max_by(|a, b| a.ratio().total_cmp(&b.ratio()))
    }

    /// One-line verdict.
    pub fn summary(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let ok = self.checks.iter().filter(|c| c.passed()).count();
        let mut line = format!(
            "{verdict} {:<24} {ok}/{} checks, {:.2}s of {}s",
            self.suite,
            self.checks.len(),
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        );
        if let Some(w) = self.worst() {
            line += &format!(", worst ratio {:.4} ({})", w.ratio(), w.label);
        }
        if !self.within_time() {
            line += ", over time limit";
        }
        if let Some(e) = &self.error {
            line += &format!(", error: {e}");
        }
        line
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        for c in &self.checks {
            writeln!(f, "    {c}")?;
        }
        Ok(())
    }
}

/// Runs the named suite. Only an unknown name is an error; solver failures
/// are recorded in the report.
pub fn check_acceptance(name: &str) -> Result<SuiteReport> {
    let &(suite, limit) = SUITES
        .iter()
        .find(|s| s.0 == name)
        .ok_or_else(|| BenchError::UnknownSuite {
            name: name.to_string(),
            available: suite_names(),
        })?;
    let body: fn() -> Result<Vec<Check>> = match suite {
        "reg-linear-rate" => reg_linear_rate,
        "catalyst-smooth-bound" => catalyst_smooth_bound,
        "r-catalyst-halving" => r_catalyst_halving,
        "sgd-certificate" => sgd_certificate,
        "sreg-contraction" => sreg_contraction,
        "minimax-det-bound" => minimax_det_bound,
        "minimax-restart-halving" => minimax_restart_halving,
        "minimax-stoch" => minimax_stoch,
        "properties" => properties,
        _ => unreachable!("listed in SUITES"),
    };
    let clock = Instant::now();
    let (checks, error) = match body() {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    Ok(SuiteReport {
        suite,
        checks,
        error,
        elapsed: clock.elapsed(),
        limit: Duration::from_secs(limit),
    })
}

fn stacked_dist_sq(s: &SaddleInstance<f64>, z: &PrimalDualPoint<f64>) -> f64 {
    let (x, y) = s.saddle_point();
    linalg::dist_sq(x, z.x()) + linalg::dist_sq(y, z.y())
}

/// Largest `measured/bound` over a sequence, with the index where it occurs.
fn worst_ratio(items: impl IntoIterator<Item = (usize, f64, f64)>) -> (usize, f64) {
    items
        .into_iter()
        .map(|(i, m, b)| (i, m / b))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
}

fn reg_linear_rate() -> Result<Vec<Check>> {
    let cases = [(2, 10.0), (2, 100.0), (10, 10.0), (10, 100.0), (50, 10.0)];
    let horizon = 200;
    let mut checks = Vec::new();
    for (i, &(dim, kappa)) in cases.iter().enumerate() {
        let mu = 1.0;
        let s = gen_saddle(dim, dim, kappa * mu, mu, mu, 100 + i as u64)?;
        let l = s.lipschitz();
        let sched = Stepsize::Constant(1.0 / l);
        let z0 = s.default_start();
        let d0 = stacked_dist_sq(&s, &z0);
        let mut z = z0.clone();
        let mut rows = Vec::with_capacity(horizon);
        for t in 1..=horizon {
            z = reg(&s, mu, &z, 1, sched)?.last;
            rows.push((t, stacked_dist_sq(&s, &z), (1.0 + mu / l).powi(-(t as i32)) * d0));
        }
        let (t, ratio) = worst_ratio(rows);
        let tag = format!("dx=dy={dim} L/mu={kappa}");
        checks.push(Check::new(format!("{tag} worst T={t}"), ratio, 1.0));
        let once = reg(&s, mu, &z0, horizon, sched)?.last;
        checks.push(Check::new(
            format!("{tag} stepwise vs one-shot T={horizon}"),
            linalg::dist_sq(once.coords(), z.coords()),
            0.0,
        ));
    }
    Ok(checks)
}

fn catalyst_smooth_bound() -> Result<Vec<Check>> {
    let l = 100.0;
    let outer = 100;
    let mut checks = Vec::new();
    for dim in [10, 100] {
        let q = gen_quadratic(dim, l, 0.0, 7 + dim as u64)?;
        let x0 = Point::new(q.default_start())?;
        let d0 = x0.dist_sq(q.minimizer());
        let bound = |k: usize| 4.0 * l * d0 / (k * k) as f64;

        let exact = catalyst_run_exact(&q, &MinRecipe::new(l, 0.0, outer, 8)?, &x0, Some(&q))?;
        let (k, ratio) = worst_ratio(gap_rows(&exact.trace.rows).map(|(k, g)| (k, g, bound(k))));
        checks.push(Check::new(format!("d={dim} exact prox worst k={k}"), ratio, 1.0));

        let mut recipe = recipe_smooth(l, 16.0 * l * d0 / (outer * outer) as f64, 0.0, d0)?;
        recipe.outer_iters = outer;
        let delta = recipe.delta_target;
        let run = catalyst_run(&q, &recipe, &x0, &mut OracleStream::new(dim as u64), Some(&q))?;
        let slack = |k: usize| bound(k) + 2.0 * k as f64 * delta;
        let (k, ratio) = worst_ratio(gap_rows(&run.trace.rows).map(|(k, g)| (k, g, slack(k))));
        checks.push(Check::new(
            format!("d={dim} sgd_prox T={} worst k={k}", recipe.inner_steps),
            ratio,
            1.0,
        ));
    }
    Ok(checks)
}

/// `(k, primal gap)` for rows `k ≥ 1`.
fn gap_rows(rows: &[TraceRow]) -> impl Iterator<Item = (usize, f64)> + '_ {
    rows.iter()
        .filter(|r| r.index > 0)
        .map(|r| (r.index as usize, r.primal_gap.unwrap_or(f64::INFINITY)))
}

fn r_catalyst_halving() -> Result<Vec<Check>> {
    let epochs = 12;
    let mut checks = Vec::new();
    for (dim, l, mu) in [(20, 100.0, 1.0), (50, 1000.0, 1.0)] {
        let q = gen_quadratic(dim, l, mu, 11 + dim as u64)?;
        let x0 = Point::new(q.default_start())?;
        let gap0 = quadratic_initial_gap(&q);
        let recipe = RestartedMinRecipe::with_epochs(l, mu, epochs, 0.0, gap0)?;
        let run = r_catalyst_run(&q, &recipe, &x0, &mut OracleStream::new(0), Some(&q))?;
        let (e, ratio) = worst_ratio(gap_rows(&run.trace.rows).map(|(e, g)| (e, g, gap0 * 0.5f64.powi(e as i32))));
        checks.push(Check::new(format!("d={dim} L/mu={} worst e={e}", l / mu), ratio, 1.0));
    }
    Ok(checks)
}

type SeedTerms = (Vec<(f64, f64)>, f64);

fn sgd_certificate() -> Result<Vec<Check>> {
    let seeds = 200u64;
    let mut checks = Vec::new();
    for sigma in [0.1, 1.0] {
        let q = gen_quadratic(10, 10.0, 1.0, 21)?.with_noise(sigma)?;
        let center = q.default_start();
        let beta = 10.0;
        let sub = ProxSubproblem::new(&q, beta, center.clone())?;
        let t0 = sgd_offset(sub.strong_convexity(), sub.smoothness());
        let mut probes = vec![("prox solution".to_string(), q.exact_prox(&center, beta)?)];
        let mut rng = OracleStream::new(99);
        let set = q.feasible_set();
        for i in 0..5 {
            let mut p = vec![0.0; set.dim()];
            rng.draw(set.diameter(), &mut p);
            set.project_in_place(&mut p);
            probes.push((format!("random point {i}"), p));
        }
        for steps in [100, 1000] {
            // per seed: (lhs, rhs) at each probe, and the reported δ
            let per_seed: Vec<Result<SeedTerms>> = (0..seeds)
                .into_par_iter()
                .map(|seed| {
                    let out = sgd_prox(&sub, steps, t0, &mut OracleStream::for_run(21, seed))?;
                    let c = out.certificate;
                    let m = c.modulus;
                    let terms = probes
                        .iter()
                        .map(|(_, u)| {
                            let lhs = sub.value(out.ergodic.coords()) - sub.value(u)
                                + c.alpha * m / 2.0 * linalg::dist_sq(u, out.last.coords());
                            let rhs = c.epsilon * m / 2.0 * linalg::dist_sq(u, &center) + c.delta;
                            (lhs, rhs)
                        })
                        .collect();
                    Ok((terms, c.delta))
                })
                .collect();
            let mut lhs = vec![0.0; probes.len()];
            let mut rhs = vec![0.0; probes.len()];
            let mut delta = 0.0;
            for r in per_seed {
                let (terms, d) = r?;
                delta += d;
                for (i, (a, b)) in terms.into_iter().enumerate() {
                    lhs[i] += a;
                    rhs[i] += b;
                }
            }
            let n = seeds as f64;
            for (i, (name, _)) in probes.iter().enumerate() {
                checks.push(Check::with_slack(
                    format!("sigma={sigma} T={steps} u={name}"),
                    lhs[i] / n,
                    rhs[i] / n,
                    1.2,
                ));
            }
            checks.push(Check::new(
                format!("sigma={sigma} T={steps} delta <= 32 sigma^2/(mu_phi T)"),
                delta / n,
                32.0 * sigma * sigma / (sub.strong_convexity() * steps as f64),
            ));
        }
    }
    Ok(checks)
}

fn sreg_contraction() -> Result<Vec<Check>> {
    let mu = 1.0;
    let s = gen_saddle(5, 5, 10.0, mu, mu, 31)?;
    let l = s.lipschitz();
    let sched = Stepsize::sreg_default(mu, l);
    let t0 = sched.offset().expect("decaying schedule");
    let z0 = s.default_start();
    let d0 = stacked_dist_sq(&s, &z0);
    let noisy = s.clone().with_noise(1.0)?;
    let sigma = noisy.noise();
    let seeds = 200u64;
    let mut checks = Vec::new();
    for mult in [2, 4, 8] {
        let steps = mult * t0;
        let det_term = 6.0 * (t0 * t0) as f64 / (steps * steps) as f64 * d0;
        let out = sreg(&s, mu, &z0, steps, sched, &mut OracleStream::new(0))?;
        checks.push(Check::new(
            format!("sigma=0 T={mult}t0={steps}"),
            stacked_dist_sq(&s, &out.last),
            det_term,
        ));
        let dists: Vec<Result<f64>> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let out = sreg(&noisy, mu, &z0, steps, sched, &mut OracleStream::for_run(31, seed))?;
                Ok(stacked_dist_sq(&noisy, &out.last))
            })
            .collect();
        let mean = dists.into_iter().sum::<Result<f64>>()? / seeds as f64;
        let bound = det_term + 768.0 * sigma * sigma / (mu * mu * steps as f64);
        checks.push(Check::with_slack(
            format!("sigma=1 T={mult}t0={steps} mean over {seeds} seeds"),
            mean,
            bound,
            1.25,
        ));
    }
    Ok(checks)
}

fn composite_rows(rows: &[TraceRow]) -> impl Iterator<Item = (usize, f64)> + '_ {
    rows.iter()
        .map(|r| (r.index as usize, r.composite_gap.unwrap_or(f64::INFINITY)))
}

fn minimax_det_bound() -> Result<Vec<Check>> {
    let s = gen_saddle(5, 5, 4.0, 0.0, 1.0, 41)?;
    let z0 = s.default_start();
    let (xs, _) = s.saddle_point();
    let dx_sq = linalg::dist_sq(xs, z0.x());
    let dy_sq = linalg::dist_sq(&s.inner_argmax(z0.x())?, z0.y());
    let ratio = (s.primal_value(z0.x()) - s.optimal_value()) / dx_sq;
    let mut checks = Vec::new();
    for k in [20, 40, 80] {
        let recipe = recipe_det(&s, Horizon::Iterations(k), Some(ratio))?;
        let run = catalyst_minimax_run(&s, &recipe, &z0, &mut OracleStream::new(0), Some(&s))?;
        let last = run.trace.last().and_then(|r| r.composite_gap).unwrap_or(f64::INFINITY);
        checks.push(Check::new(
            format!("K={k} T={}", recipe.inner_steps),
            last,
            recipe.composite_bound(dx_sq, dy_sq),
        ));
    }
    Ok(checks)
}

fn minimax_restart_halving() -> Result<Vec<Check>> {
    let epochs = 8;
    let mut checks = Vec::new();
    for (i, (dim, l, mu_p)) in [(4, 4.0, 0.25), (10, 8.0, 0.1)].into_iter().enumerate() {
        let s = gen_saddle(dim, dim, l, mu_p, 1.0, 51 + i as u64)?;
        let z0 = s.default_start();
        let recipe = restarted_det(&s, epochs)?;
        let run = r_catalyst_minimax_run(&s, &recipe, &z0, &mut OracleStream::new(0), Some(&s))?;
        let c0 = run.trace.rows[0].composite_gap.unwrap_or(f64::NAN);
        let rows = composite_rows(&run.trace.rows).filter(|&(e, _)| e > 0);
        let (e, ratio) = worst_ratio(rows.map(|(e, c)| (e, c, c0 * 0.5f64.powi(e as i32))));
        checks.push(Check::new(
            format!(
                "dx=dy={dim} mu_d/mu_p={} K={} worst e={e}",
                1.0 / mu_p,
                recipe.epoch.outer_iters
            ),
            ratio,
            1.0,
        ));
    }
    Ok(checks)
}

/// Noisy strongly-convex-strongly-concave instance for the stochastic suite.
fn stochastic_instance(scale: f64) -> Result<SaddleInstance<f64>> {
    let params = SaddleParams {
        scale,
        ..SaddleParams::new(2, 2, 1.5, 1.0, 1.0)
    };
    Ok(gen_saddle_with(params, 61)?.with_noise(0.5)?)
}

fn minimax_stoch() -> Result<Vec<Check>> {
    let s = stochastic_instance(40.0)?;
    let z0 = s.default_start();
    let gap0 = composite_at(&s, &z0, s.dual_modulus() / 12.0)?;
    let epochs = 4;
    let seeds = 50u64;
    let recipe = restarted_stoch(&s, epochs, gap0)?;
    let finals: Vec<Result<f64>> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let run = r_catalyst_minimax_run(&s, &recipe, &z0, &mut OracleStream::for_run(61, seed), Some(&s))?;
            Ok(run.trace.last().and_then(|r| r.composite_gap).unwrap_or(f64::INFINITY))
        })
        .collect();
    let mean = finals.into_iter().sum::<Result<f64>>()? / seeds as f64;
    let mut checks = vec![Check::with_slack(
        format!("e={epochs} mean over {seeds} seeds, K={}", recipe.epoch.outer_iters),
        mean,
        gap0 * 0.5f64.powi(epochs as i32),
        1.3,
    )];

    // Doubling 1/ε adds one epoch; epoch lengths do not depend on the total.
    let longest = 6;
    let plan = restarted_stoch(&s, longest, gap0)?;
    let run = r_catalyst_minimax_run(&s, &plan, &z0, &mut OracleStream::new(62), Some(&s))?;
    let sfo: Vec<u64> = run.trace.rows.iter().map(|r| r.sfo_calls).collect();
    for e in 2..longest {
        checks.push(Check::new(
            format!("SFO(eps/2)/SFO(eps) at E={e}"),
            sfo[e + 1] as f64 / sfo[e] as f64,
            4.4,
        ));
    }
    Ok(checks)
}

fn properties() -> Result<Vec<Check>> {
    let mut checks = projection_properties()?;
    checks.extend(weight_properties());
    checks.extend(oracle_moments()?);
    checks.extend(harness_properties()?);
    Ok(checks)
}

fn random_set(rng: &mut OracleStream, case: usize) -> Result<FeasibleSet<f64>> {
    let dim = 1 + case % 17;
    let mut v = vec![0.0; dim];
    let mut scalar = [0.0f64];
    rng.draw(1.0, &mut scalar);
    let size = 0.1 + scalar[0].abs() * 3.0;
    Ok(match case % 4 {
        0 => {
            rng.draw(dim as f64, &mut v);
            FeasibleSet::ball(v, size)?
        }
        1 => {
            rng.draw(dim as f64, &mut v);
            let upper = v.iter().map(|&a| a + size).collect();
            FeasibleSet::cube(v, upper)?
        }
        2 => FeasibleSet::simplex(dim, size)?,
        _ => FeasibleSet::product(
            FeasibleSet::origin_ball(dim, size)?,
            FeasibleSet::simplex(1 + case % 5, size)?,
        ),
    })
}

fn projection_properties() -> Result<Vec<Check>> {
    let cases = 10_000;
    let mut rng = OracleStream::new(71);
    let (mut idem, mut expand) = (0, 0);
    for case in 0..cases {
        let set = random_set(&mut rng, case)?;
        let d = set.dim();
        let (mut p, mut q) = (vec![0.0; d], vec![0.0; d]);
        rng.draw(5.0 * d as f64, &mut p);
        rng.draw(5.0 * d as f64, &mut q);
        let pp = set.project_slice(&p)?;
        let pq = set.project_slice(&q)?;
        let scale = 1.0 + linalg::norm(&pp);
        if linalg::dist(&set.project_slice(&pp)?, &pp) > 1e-12 * scale {
            idem += 1;
        }
        if linalg::dist(&pp, &pq) > linalg::dist(&p, &q) * (1.0 + 1e-12) + 1e-14 {
            expand += 1;
        }
    }
    Ok(vec![
        Check::count(format!("projection idempotence, {cases} cases"), idem),
        Check::count(format!("projection nonexpansiveness, {cases} cases"), expand),
    ])
}

fn weight_properties() -> Vec<Check> {
    let mut checks = Vec::new();
    // Extragradient weights: Λ_{t+1} = (1 + μη_t)Λ_t, Λ₀ = 1.
    let (mu, l) = (0.5, 20.0);
    let sched = Stepsize::sreg_default(mu, l);
    let steps = 10_000;
    let (mut lam, mut sum) = (1.0f64, 0.0f64);
    for t in 0..steps {
        let w = mu * sched.at(t) * lam;
        sum += w;
        lam += w;
    }
    checks.push(Check::new(
        format!("sum mu eta_t Lambda_t = Lambda_T - Lambda_0, T={steps} (relative error)"),
        (sum - (lam - 1.0)).abs() / (lam - 1.0),
        1e-12,
    ));
    // SGD weights: Λ_t = Π(1 − μη_s), so Σ μη_tΛ_{t−1} = 1 − Λ_T.
    let t0 = 8;
    let (mut lam, mut sum) = (1.0f64, 0.0f64);
    let mut worst_lambda = 0.0f64;
    for t in 1..=steps {
        let w = mu * sgd_step_size(mu, t, t0) * lam;
        sum += w;
        lam -= w;
        let closed: f64 = sgd_lambda(t, t0);
        worst_lambda = worst_lambda.max(((lam - closed) / closed).abs());
    }
    let closed: f64 = sgd_lambda(steps, t0);
    checks.push(Check::new(
        format!("sum mu eta_t Lambda_(t-1) = 1 - Lambda_T, T={steps} (relative error)"),
        (sum - (1.0 - closed)).abs() / (1.0 - closed),
        1e-12,
    ));
    checks.push(Check::new(
        format!("Lambda_t recursion vs closed form, t <= {steps} (relative error)"),
        worst_lambda,
        1e-10,
    ));
    let worst_gamma = (1..=steps)
        .map(|k| {
            let closed = 2.0 / (k as f64 * (k as f64 + 1.0));
            ((gamma_product::<f64>(k) - closed) / closed).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::new(
        format!("Gamma_k product vs 2/(k(k+1)), k <= {steps} (relative error)"),
        worst_gamma,
        1e-10,
    ));
    checks
}

fn oracle_moments() -> Result<Vec<Check>> {
    let samples = 100_000;
    let sigma = 2.0;
    let q = gen_quadratic(4, 10.0, 1.0, 81)?.with_noise(sigma)?;
    let x = q.default_start();
    let grad = q.gradient(&x);
    let mut stream = OracleStream::new(81);
    let mut mean = vec![0.0; x.len()];
    let mut second = 0.0;
    for _ in 0..samples {
        let g = sample_grad(&q, &x, &mut stream)?;
        linalg::axpy(1.0 / samples as f64, &g, &mut mean);
        second += linalg::dist_sq(&g, &grad) / samples as f64;
    }
    Ok(vec![
        Check::new(
            format!("oracle bias norm over {samples} draws"),
            linalg::dist(&mean, &grad),
            0.05 * sigma,
        ),
        Check::new(
            format!("oracle |E||n||^2 / sigma^2 - 1| over {samples} draws"),
            (second / (sigma * sigma) - 1.0).abs(),
            0.05,
        ),
    ])
}

fn strip_wall(rows: Vec<TraceRow>) -> Vec<TraceRow> {
    rows.into_iter()
        .map(|mut r| {
            r.wall_ms = 0.0;
            r
        })
        .collect()
}

fn harness_properties() -> Result<Vec<Check>> {
    let cfg = ExperimentConfig::from_json(
        r#"{"problem": {"kind": "quadratic", "d": 8, "L": 10, "mu": 0, "sigma": 1, "seed": 5},
            "algorithm": {"name": "catalyst_sgd", "outer_iters": 20, "inner_steps": 50},
            "seeds": 6}"#,
    )?;
    let a = run_experiment(&cfg, Some(1))?;
    let mut buf = Vec::new();
    csv_io::write_rows(&a.rows, &mut buf)?;
    let back = csv_io::read_rows(buf.as_slice())?;
    let mismatched = back.iter().zip(&a.rows).filter(|(x, y)| x != y).count() + back.len().abs_diff(a.rows.len());

    let b = run_experiment(&cfg, Some(4))?;
    let c = run_experiment(&cfg, None)?;
    let (a, b, c) = (strip_wall(a.rows), strip_wall(b.rows), strip_wall(c.rows));
    let differing = |x: &[TraceRow], y: &[TraceRow]| {
        x.iter()
            .zip(y)
            .filter(|(r, s)| {
                let bits = |t: &TraceRow| {
                    [t.primal_gap, t.dist_primal_sq, t.dist_dual_sq, t.composite_gap].map(|v| v.map(f64::to_bits))
                };
                r != s || bits(r) != bits(s)
            })
            .count()
            + x.len().abs_diff(y.len())
    };
    let stoch_a = run_experiment(&saddle_cfg()?, Some(1))?;
    let stoch_b = run_experiment(&saddle_cfg()?, Some(3))?;
    Ok(vec![
        Check::count(format!("csv round trip, {} rows", a.len()), mismatched),
        Check::count(
            "bitwise determinism across thread counts (catalyst_sgd)",
            differing(&a, &b) + differing(&a, &c),
        ),
        Check::count(
            "bitwise determinism across thread counts (sreg)",
            differing(&strip_wall(stoch_a.rows), &strip_wall(stoch_b.rows)),
        ),
    ])
}

fn saddle_cfg() -> Result<ExperimentConfig> {
    ExperimentConfig::from_json(
        r#"{"problem": {"kind": "saddle", "dx": 3, "dy": 2, "L": 5, "mu_p": 0.5, "mu_d": 1, "sigma": 0.7, "seed": 9},
            "algorithm": {"name": "sreg", "steps": 200},
            "seeds": 5}"#,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_lists_the_suites() {
        match check_acceptance("nope") {
            Err(BenchError::UnknownSuite { available, .. }) => assert_eq!(available.len(), 9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn check_ratio_and_verdict() {
        let c = Check::with_slack("x", 1.1, 1.0, 1.2);
        assert!(c.passed());
        assert!((c.ratio() - 1.1 / 1.2).abs() < 1e-15);
        assert!(!Check::count("y", 1).passed());
        assert_eq!(Check::count("z", 0).ratio(), 0.0);
    }
}
