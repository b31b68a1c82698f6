//! Catalyst for convex minimization and its restarted strongly convex
//! variant, with prox-SGD (or an exact prox) as the inner method.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{ProxSubproblem, SmoothObjective};
use crate::oracle::OracleStream;
use crate::point::Point;
use crate::subsolvers::weights::{gamma_product, sgd_lambda};
use crate::subsolvers::{sgd_offset, sgd_prox};
use crate::trace::{RunTrace, TraceRow};
use crate::Scalar;

/// Known solution of a minimization instance, used only for trace metrics.
pub trait MinReference<S> {
    fn optimal_value(&self) -> S;
    fn minimizer(&self) -> &[S];
}

/// Closed-form solution of `min_x f(x) + (β/2)‖x − c‖²`.
pub trait ExactProx<S> {
    fn exact_prox(&self, center: &[S], beta: S) -> Result<Vec<S>>;
}

/// Parameters of one catalyst run: `γ_k = 2/(k+1)`, `β_k = (k+1)L/k` and
/// `T` prox-SGD steps per outer iteration with offset `t₀ = 8`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinRecipe<S> {
    /// Outer iterations `K`.
    pub outer_iters: usize,
    /// Smoothness `L` of the objective.
    pub lipschitz: S,
    /// Strong-convexity modulus entering the `x̄` update.
    pub mu: S,
    /// Inner steps `T`.
    pub inner_steps: usize,
    /// Per-prox noise target `δ`.
    pub delta_target: S,
}

/// Inner offset: the subproblems are `β_k`-strongly convex and `2β_k`-smooth.
const OFFSET: usize = 8;

impl<S: Scalar> MinRecipe<S> {
    pub fn new(lipschitz: S, mu: S, outer_iters: usize, inner_steps: usize) -> Result<Self> {
        if !(lipschitz > S::zero()) || !lipschitz.is_finite() {
            return Err(Error::param("lipschitz", format!("must be positive, got {lipschitz}")));
        }
        if !(mu >= S::zero()) || mu > lipschitz {
            return Err(Error::param("mu", format!("need 0 <= mu <= L, got {mu}")));
        }
        if outer_iters == 0 {
            return Err(Error::param("outer_iters", "must be positive"));
        }
        if inner_steps < OFFSET {
            return Err(Error::param("inner_steps", format!("must be at least {OFFSET}")));
        }
        Ok(Self {
            outer_iters,
            lipschitz,
            mu,
            inner_steps,
            delta_target: S::zero(),
        })
    }

    pub fn gamma(&self, k: usize) -> S {
        S::of(2.0) / S::of_usize(k + 1)
    }

    pub fn beta(&self, k: usize) -> S {
        S::of_usize(k + 1) * self.lipschitz / S::of_usize(k)
    }

    pub fn offset(&self) -> usize {
        OFFSET
    }

    /// `Λ_T = 90/((T+9)(T+10))`.
    pub fn lambda_t(&self) -> S {
        sgd_lambda(self.inner_steps, OFFSET)
    }

    /// Relative inexactness `ε = Λ_T/(1 − Λ_T)` of every prox step.
    pub fn epsilon(&self) -> S {
        let l = self.lambda_t();
        l / (S::one() - l)
    }

    /// `α_k = β_k/(1 − Λ_T)`.
    pub fn alpha(&self, k: usize) -> S {
        self.beta(k) / (S::one() - self.lambda_t())
    }

    /// Bound `32σ²/(β_k T)` on the inner noise term.
    pub fn delta_bound(&self, sigma: S, k: usize) -> S {
        S::of(32.0) * sigma * sigma / (self.beta(k) * S::of_usize(self.inner_steps))
    }

    /// Oracle calls of one run, `K·T`.
    pub fn sfo_calls(&self) -> u64 {
        self.outer_iters as u64 * self.inner_steps as u64
    }

    /// Checks `γ₁ = 1` and
    /// `(β_k + ε_k)γ_k²/Γ_k ≤ [α_{k−1}γ_{k−1} + μ(1−γ_{k−1})]γ_{k−1}/Γ_{k−1}`
    /// for `k ≤ K`, with `(α_k, ε_k)` the relative inexactness scaled by
    /// `β_k` (`exact` selects `α_k = β_k`, `ε_k = 0`).
    pub fn self_check(&self, exact: bool) -> Result<()> {
        if self.gamma(1) != S::one() {
            return Err(Error::Configuration("gamma_1 must equal 1".into()));
        }
        let eps = if exact { S::zero() } else { self.epsilon() };
        if eps > S::one() {
            return Err(Error::Configuration(format!("inner inexactness {eps} exceeds 1")));
        }
        let tol = S::of(1e-10).max(S::of(64.0) * S::epsilon());
        for k in 2..=self.outer_iters {
            let (g, gp) = (self.gamma(k), self.gamma(k - 1));
            // both sides multiplied by Γ_k = (1 − γ_k)Γ_{k−1}
            let lhs = self.beta(k) * (S::one() + eps) * g * g;
            let alpha_prev = self.beta(k - 1) * (S::one() + eps);
            let rhs = (alpha_prev * gp + self.mu * (S::one() - gp)) * gp * (S::one() - g);
            if lhs > rhs * (S::one() + tol) {
                return Err(Error::Configuration(format!(
                    "catalyst condition (beta_k+eps_k)gamma_k^2/Gamma_k <= \
                     [alpha_(k-1)gamma_(k-1)+mu(1-gamma_(k-1))]gamma_(k-1)/Gamma_(k-1) fails at k={k}: {lhs} > {rhs}"
                )));
            }
        }
        Ok(())
    }

    /// `4L‖x* − x̄₀‖²/k² + 2kδ`.
    pub fn gap_bound(&self, dist0_sq: S, k: usize, delta: S) -> S {
        let kk = S::of_usize(k);
        S::of(4.0) * self.lipschitz * dist0_sq / (kk * kk) + S::of(2.0) * kk * delta
    }

    /// `Γ_k = Π_{j=2}^{k}(1 − γ_j) = 2/(k(k+1))`.
    pub fn gamma_product(&self, k: usize) -> S {
        gamma_product(k)
    }
}

/// Smooth recipe: `K = ⌈4√(LD²/ε)⌉`, `T = ⌈8 + 32σ²K/(Lε)⌉`, `δ = ε/(4K)`.
pub fn recipe_smooth<S: Scalar>(lipschitz: S, epsilon: S, sigma: S, dist_sq: S) -> Result<MinRecipe<S>> {
    if !(epsilon > S::zero()) {
        return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
    }
    if !(dist_sq > S::zero()) {
        return Err(Error::param("dist_sq", format!("must be positive, got {dist_sq}")));
    }
    if !(sigma >= S::zero()) {
        return Err(Error::param("sigma", "must be nonnegative"));
    }
    let k = (S::of(4.0) * (lipschitz * dist_sq / epsilon).sqrt()).ceil();
    let kk = k.to_usize().unwrap_or(usize::MAX).max(1);
    let t = (S::of(8.0) + S::of(32.0) * sigma * sigma * S::of_usize(kk) / (lipschitz * epsilon)).ceil();
    let mut recipe = MinRecipe::new(lipschitz, S::zero(), kk, t.to_usize().unwrap_or(usize::MAX))?;
    recipe.delta_target = epsilon / (S::of(4.0) * S::of_usize(kk));
    Ok(recipe)
}

/// Restarted recipe: `K = ⌈6√(L/μ)⌉` per epoch and
/// `T_e = ⌈8 + 128σ²2^eK/(LΔ̂₀)⌉`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartedMinRecipe<S> {
    /// Epoch template; its `inner_steps` is replaced by `epoch_steps[e]`.
    pub epoch: MinRecipe<S>,
    pub epoch_steps: Vec<usize>,
    /// Overestimate `Δ̂₀ ≥ f(x₍₀₎) − f*`.
    pub initial_gap: S,
}

impl<S: Scalar> RestartedMinRecipe<S> {
    /// Plan with a fixed number of epochs.
    pub fn with_epochs(lipschitz: S, mu: S, epochs: usize, sigma: S, initial_gap: S) -> Result<Self> {
        if !(mu > S::zero()) {
            return Err(Error::Configuration(
                "restarted catalyst needs mu > 0; use catalyst_run for mu = 0".into(),
            ));
        }
        if !(initial_gap > S::zero()) {
            return Err(Error::param(
                "initial_gap",
                format!("must be positive, got {initial_gap}"),
            ));
        }
        if epochs == 0 {
            return Err(Error::param("epochs", "must be positive"));
        }
        let k = (S::of(6.0) * (lipschitz / mu).sqrt())
            .ceil()
            .to_usize()
            .unwrap_or(usize::MAX);
        let epoch = MinRecipe::new(lipschitz, mu, k, OFFSET)?;
        let noise = S::of(128.0) * sigma * sigma * S::of_usize(k) / (lipschitz * initial_gap);
        let epoch_steps = (1..=epochs)
            .map(|e| {
                (S::of(8.0) + noise * S::of(2.0).powi(e as i32))
                    .ceil()
                    .to_usize()
                    .unwrap_or(usize::MAX)
            })
            .collect();
        Ok(Self {
            epoch,
            epoch_steps,
            initial_gap,
        })
    }

    pub fn epochs(&self) -> usize {
        self.epoch_steps.len()
    }

    /// Per-prox noise target of epoch `e`: `2^{−e−2}Δ̂₀/K`.
    pub fn delta_target(&self, e: usize) -> S {
        S::of(2.0).powi(-(e as i32) - 2) * self.initial_gap / S::of_usize(self.epoch.outer_iters)
    }

    /// The recipe of epoch `e` (1-based).
    pub fn epoch_recipe(&self, e: usize) -> MinRecipe<S> {
        let mut r = self.epoch.clone();
        r.inner_steps = self.epoch_steps[e - 1];
        r.delta_target = self.delta_target(e);
        r
    }

    pub fn sfo_calls(&self) -> u64 {
        self.epoch_steps
            .iter()
            .map(|&t| t as u64 * self.epoch.outer_iters as u64)
            .sum()
    }
}

/// `E = ⌈log₂(Δ̂₀/ε)⌉` epochs of [`RestartedMinRecipe::with_epochs`].
pub fn recipe_strongly_convex<S: Scalar>(
    lipschitz: S,
    mu: S,
    epsilon: S,
    sigma: S,
    initial_gap: S,
) -> Result<RestartedMinRecipe<S>> {
    if !(epsilon > S::zero()) {
        return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
    }
    let epochs = (initial_gap / epsilon)
        .log2()
        .ceil()
        .max(S::one())
        .to_usize()
        .unwrap_or(1);
    RestartedMinRecipe::with_epochs(lipschitz, mu, epochs, sigma, initial_gap)
}

/// Final point, trace and oracle count of a catalyst run.
#[derive(Debug, Clone, PartialEq)]
pub struct MinRun<S> {
    pub point: Point<S>,
    pub trace: RunTrace,
    pub sfo_calls: u64,
}

struct Step<S> {
    ergodic: Vec<S>,
    last: Vec<S>,
    alpha: S,
    sfo: u64,
}

fn fill_metrics<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    row: &mut TraceRow,
    prob: &P,
    x: &[S],
    reference: Option<&dyn MinReference<S>>,
) {
    if let Some(r) = reference {
        row.primal_gap = Some((prob.value(x) - r.optimal_value()).as_f64());
        row.dist_primal_sq = Some(linalg::dist_sq(x, r.minimizer()).as_f64());
    }
}

fn check_problem<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &P,
    recipe: &MinRecipe<S>,
    x0: &Point<S>,
) -> Result<()> {
    Error::check_dim("catalyst start", prob.dim(), x0.dim())?;
    if recipe.lipschitz < prob.smoothness() {
        return Err(Error::Configuration(format!(
            "recipe L = {} is below the objective's L = {}",
            recipe.lipschitz,
            prob.smoothness()
        )));
    }
    if recipe.mu > prob.strong_convexity() {
        return Err(Error::Configuration(format!(
            "recipe mu = {} exceeds the objective's mu = {}",
            recipe.mu,
            prob.strong_convexity()
        )));
    }
    Ok(())
}

/// Outer loop shared by the SGD and exact-prox variants. `solve` maps
/// `(β_k, x̂_k)` to the inner output.
#[allow(clippy::too_many_arguments)]
fn outer_loop<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &P,
    recipe: &MinRecipe<S>,
    x0: &[S],
    seed: u64,
    sfo_start: u64,
    index_offset: u64,
    trace: Option<&mut RunTrace>,
    reference: Option<&dyn MinReference<S>>,
    mut solve: impl FnMut(S, &[S]) -> Result<Step<S>>,
) -> Result<(Vec<S>, u64)> {
    let clock = Instant::now();
    let mut trace = trace;
    let d = x0.len();
    let mut x_bar = x0.to_vec();
    let mut x_tilde = x0.to_vec();
    let mut x_hat = vec![S::zero(); d];
    let mut sfo = sfo_start;
    let mu = recipe.mu;
    for k in 1..=recipe.outer_iters {
        let (g, b) = (recipe.gamma(k), recipe.beta(k));
        for i in 0..d {
            x_hat[i] = g * x_bar[i] + (S::one() - g) * x_tilde[i];
        }
        let step = solve(b, &x_hat)?;
        sfo += step.sfo;
        let a = step.alpha;
        let denom = a * g + mu * (S::one() - g);
        for i in 0..d {
            x_bar[i] = (a * step.last[i] + (mu - a) * (S::one() - g) * x_tilde[i]) / denom;
        }
        x_tilde = step.ergodic;
        if !linalg::all_finite(&x_tilde) || !linalg::all_finite(&x_bar) {
            return Err(Error::NonFinite("catalyst iterate"));
        }
        if let Some(t) = trace.as_deref_mut() {
            let mut row = TraceRow::new(seed, index_offset + k as u64, sfo);
            fill_metrics(&mut row, prob, &x_tilde, reference);
            row.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
            t.push(row);
        }
    }
    Ok((x_tilde, sfo))
}

fn sgd_solver<'a, S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &'a P,
    inner_steps: usize,
    stream: &'a mut OracleStream,
) -> impl FnMut(S, &[S]) -> Result<Step<S>> + 'a {
    move |beta, center| {
        let sub = ProxSubproblem::new(prob, beta, center.to_vec())?.with_moduli(beta, S::of(2.0) * beta)?;
        let offset = sgd_offset(beta, S::of(2.0) * beta);
        let out = sgd_prox(&sub, inner_steps, offset, stream)?;
        Ok(Step {
            alpha: out.certificate.scaled_alpha(),
            ergodic: out.ergodic.into_vec(),
            last: out.last.into_vec(),
            sfo: out.sfo_calls,
        })
    }
}

fn initial_row<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &P,
    x0: &[S],
    seed: u64,
    reference: Option<&dyn MinReference<S>>,
) -> TraceRow {
    let mut row = TraceRow::new(seed, 0, 0);
    fill_metrics(&mut row, prob, x0, reference);
    row
}

/// Catalyst with prox-SGD inner solves: `x̂_k = γ_k x̄_{k−1} + (1−γ_k)x̃_{k−1}`,
/// prox-SGD on `f + (β_k/2)‖· − x̂_k‖²` started at `x̂_k`, then
/// `x̄_k = [α_k x_k + (μ − α_k)(1−γ_k)x̃_{k−1}]/(α_kγ_k + μ(1−γ_k))` with
/// `α_k` taken from the inner certificate.
pub fn catalyst_run<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &P,
    recipe: &MinRecipe<S>,
    x0: &Point<S>,
    stream: &mut OracleStream,
    reference: Option<&dyn MinReference<S>>,
) -> Result<MinRun<S>> {
    check_problem(prob, recipe, x0)?;
    recipe.self_check(false)?;
    let seed = stream.seed();
    let mut trace = RunTrace::default();
    trace.push(initial_row(prob, x0.coords(), seed, reference));
    let solve = sgd_solver(prob, recipe.inner_steps, stream);
    let (x, sfo) = outer_loop(
        prob,
        recipe,
        x0.coords(),
        seed,
        0,
        0,
        Some(&mut trace),
        reference,
        solve,
    )?;
    Ok(MinRun {
        point: Point::from_vec_unchecked(x),
        trace,
        sfo_calls: sfo,
    })
}

/// Catalyst with exact prox steps (`α_k = β_k`, `ε_k = δ_k = 0`); no oracle
/// calls are counted.
pub fn catalyst_run_exact<S: Scalar, P: SmoothObjective<S> + ExactProx<S> + ?Sized>(
    prob: &P,
    recipe: &MinRecipe<S>,
    x0: &Point<S>,
    reference: Option<&dyn MinReference<S>>,
) -> Result<MinRun<S>> {
    check_problem(prob, recipe, x0)?;
    recipe.self_check(true)?;
    let mut trace = RunTrace::default();
    trace.push(initial_row(prob, x0.coords(), 0, reference));
    let solve = |beta: S, center: &[S]| {
        let x = prob.exact_prox(center, beta)?;
        Ok(Step {
            ergodic: x.clone(),
            last: x,
            alpha: beta,
            sfo: 0,
        })
    };
    let (x, sfo) = outer_loop(prob, recipe, x0.coords(), 0, 0, 0, Some(&mut trace), reference, solve)?;
    Ok(MinRun {
        point: Point::from_vec_unchecked(x),
        trace,
        sfo_calls: sfo,
    })
}

/// Restarted catalyst: epoch `e` runs [`catalyst_run`] for `K` iterations
/// from `x₍ₑ₋₁₎` with `T_e` inner steps. The trace has one row per epoch.
pub fn r_catalyst_run<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &P,
    recipe: &RestartedMinRecipe<S>,
    x0: &Point<S>,
    stream: &mut OracleStream,
    reference: Option<&dyn MinReference<S>>,
) -> Result<MinRun<S>> {
    if !(prob.strong_convexity() > S::zero()) {
        return Err(Error::Configuration(
            "restarted catalyst needs mu > 0; use catalyst_run for mu = 0".into(),
        ));
    }
    for e in 1..=recipe.epochs() {
        let r = recipe.epoch_recipe(e);
        check_problem(prob, &r, x0)?;
        r.self_check(false)?;
    }
    let clock = Instant::now();
    let seed = stream.seed();
    let mut trace = RunTrace::default();
    trace.push(initial_row(prob, x0.coords(), seed, reference));
    let mut x = x0.coords().to_vec();
    let mut sfo = 0;
    for e in 1..=recipe.epochs() {
        let r = recipe.epoch_recipe(e);
        let solve = sgd_solver(prob, r.inner_steps, stream);
        let (next, total) = outer_loop(prob, &r, &x, seed, sfo, 0, None, reference, solve)?;
        x = next;
        sfo = total;
        let mut row = TraceRow::new(seed, e as u64, sfo);
        fill_metrics(&mut row, prob, &x, reference);
        row.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        trace.push(row);
    }
    Ok(MinRun {
        point: Point::from_vec_unchecked(x),
        trace,
        sfo_calls: sfo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::FeasibleSet;

    /// f(x) = (a/2)x² − bx on [-10, 10].
    struct Parabola {
        a: f64,
        b: f64,
        mu: f64,
        set: FeasibleSet<f64>,
        star: [f64; 1],
    }

    impl Parabola {
        fn new(a: f64, b: f64, mu: f64) -> Self {
            Self {
                a,
                b,
                mu,
                set: FeasibleSet::origin_ball(1, 10.0).unwrap(),
                star: [b / a],
            }
        }
    }

    impl SmoothObjective<f64> for Parabola {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            0.5 * self.a * x[0] * x[0] - self.b * x[0]
        }
        fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
            out[0] = self.a * x[0] - self.b;
        }
        fn smoothness(&self) -> f64 {
            self.a
        }
        fn strong_convexity(&self) -> f64 {
            self.mu
        }
        fn feasible_set(&self) -> &FeasibleSet<f64> {
            &self.set
        }
    }

    impl ExactProx<f64> for Parabola {
        fn exact_prox(&self, c: &[f64], beta: f64) -> Result<Vec<f64>> {
            Ok(vec![(beta * c[0] + self.b) / (self.a + beta)])
        }
    }

    impl MinReference<f64> for Parabola {
        fn optimal_value(&self) -> f64 {
            -0.5 * self.b * self.b / self.a
        }
        fn minimizer(&self) -> &[f64] {
            &self.star
        }
    }

    #[test]
    fn smooth_recipe_numbers() {
        let r = recipe_smooth(100.0, 0.01, 0.0, 1.0).unwrap();
        assert_eq!(r.outer_iters, 400);
        assert_eq!(r.inner_steps, 8);
        let lam: f64 = r.lambda_t();
        assert!((lam - 5.0 / 17.0).abs() < 1e-15);
        assert_eq!(r.beta(1), 200.0);
        r.self_check(false).unwrap();
        r.self_check(true).unwrap();
        assert_eq!(r.sfo_calls(), 3200);
    }

    #[test]
    fn restarted_recipe_numbers() {
        let r = RestartedMinRecipe::with_epochs(100.0, 1.0, 3, 0.0, 1.0).unwrap();
        assert_eq!(r.epoch.outer_iters, 60);
        assert_eq!(r.epoch_steps, vec![8, 8, 8]);
        let a = recipe_strongly_convex(100.0, 1.0, 1e-3, 0.0, 1.0).unwrap();
        let b = recipe_strongly_convex(100.0, 1.0, 1e-3, 0.0, 8.0).unwrap();
        assert_eq!(b.epochs(), a.epochs() + 3);
        assert!(matches!(
            RestartedMinRecipe::with_epochs(1.0, 0.0, 3, 0.0, 1.0),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn gamma_product_closed_form() {
        let r = MinRecipe::new(1.0, 0.0, 5, 8).unwrap();
        for k in 1..=1000 {
            let g: f64 = r.gamma_product(k);
            assert!((g - 2.0 / (k as f64 * (k as f64 + 1.0))).abs() < 1e-12);
        }
    }

    #[test]
    fn first_iteration_hits_prox_point() {
        // γ₁ = 1 makes x̂₁ = x̄₀ and, with μ = 0 and exact prox, x̄₁ = x₁
        let p = Parabola::new(2.0, 0.0, 0.0);
        let r = MinRecipe::new(2.0, 0.0, 1, 8).unwrap();
        let run = catalyst_run_exact(&p, &r, &Point::new(vec![1.0]).unwrap(), Some(&p)).unwrap();
        // β₁ = 2L = 4: prox of x² at 1 is 4/(2+4)
        assert!((run.point.coords()[0] - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn exact_mode_meets_bound_every_k() {
        let p = Parabola::new(3.0, 1.5, 0.0);
        let r = MinRecipe::new(3.0, 0.0, 60, 8).unwrap();
        let x0 = Point::new(vec![-8.0]).unwrap();
        let run = catalyst_run_exact(&p, &r, &x0, Some(&p)).unwrap();
        let d0 = x0.dist_sq(&p.star);
        for row in &run.trace.rows[1..] {
            let k = row.index as usize;
            assert!(row.primal_gap.unwrap() <= r.gap_bound(d0, k, 0.0), "k={k}");
        }
        assert_eq!(run.sfo_calls, 0);
    }

    #[test]
    fn sgd_mode_counts_calls() {
        let p = Parabola::new(3.0, 1.5, 0.0);
        let r = MinRecipe::new(3.0, 0.0, 25, 8).unwrap();
        let x0 = Point::new(vec![-8.0]).unwrap();
        let run = catalyst_run(&p, &r, &x0, &mut OracleStream::new(1), Some(&p)).unwrap();
        assert_eq!(run.sfo_calls, 200);
        for (k, row) in run.trace.rows.iter().enumerate() {
            assert_eq!(row.sfo_calls, 8 * k as u64);
        }
        let d0 = x0.dist_sq(&p.star);
        let last = run.trace.last().unwrap();
        assert!(last.primal_gap.unwrap() <= r.gap_bound(d0, 25, 0.0));
    }

    #[test]
    fn restart_halves() {
        let p = Parabola::new(4.0, 2.0, 1.0);
        let x0 = Point::new(vec![-9.0]).unwrap();
        let gap0 = p.value(x0.coords()) - p.optimal_value();
        let r = RestartedMinRecipe::with_epochs(4.0, 1.0, 6, 0.0, gap0).unwrap();
        let run = r_catalyst_run(&p, &r, &x0, &mut OracleStream::new(0), Some(&p)).unwrap();
        for row in &run.trace.rows {
            let bound = gap0 * 2f64.powi(-(row.index as i32));
            assert!(row.primal_gap.unwrap() <= bound);
        }
        assert_eq!(run.sfo_calls, r.sfo_calls());
    }

    #[test]
    fn rejects_understated_smoothness() {
        let p = Parabola::new(3.0, 0.0, 0.0);
        let r = MinRecipe::new(1.0, 0.0, 4, 8).unwrap();
        let x0 = Point::new(vec![1.0]).unwrap();
        assert!(matches!(
            catalyst_run(&p, &r, &x0, &mut OracleStream::new(0), None),
            Err(Error::Configuration(_))
        ));
    }
}
