//! Catalyst for convex-concave minimax problems with REG (deterministic) or
//! asymmetric SREG (stochastic) inner solves, and its restarted variant.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{SaddleObjective, SaddleSubproblem};
use crate::oracle::OracleStream;
use crate::point::PrimalDualPoint;
use crate::subsolvers::{reg, sreg_asym, AsymConfig, InexactnessCertificate, SolverOutput, Stepsize};
use crate::trace::{RunTrace, TraceRow};
use crate::Scalar;

/// Known solution of a saddle instance, used only for trace metrics.
pub trait MinimaxReference<S> {
    /// `f(x*)` with `f(x) = max_y F(x, y)`.
    fn optimal_value(&self) -> S;
    fn primal_value(&self, x: &[S]) -> S;
    /// `argmax_y F(x, y)`, which is also the maximizer of any prox
    /// subproblem at `x`.
    fn inner_argmax(&self, x: &[S]) -> Result<Vec<S>>;
    fn saddle_point(&self) -> (&[S], &[S]);
}

/// Which inner method a recipe wires in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerKind {
    /// REG with `η_t = (k+2)/(3(k+1)L)`, `β_k = μ_d(k+1)/(2(k+2))`.
    Deterministic,
    /// Asymmetric SREG with `η̄ = (k+2)/(24(k+1)L)`, `β_k = μ_d(k+1)/(4(k+2))`.
    Stochastic,
}

/// How long a single catalyst run should be.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon<S> {
    Iterations(usize),
    /// Target accuracy `ε` together with an estimate of
    /// `2μ_d‖x* − x̃₀‖² + μ_d‖ỹ₀* − y₀‖²`.
    Accuracy {
        epsilon: S,
        potential: S,
    },
}

/// One numerically evaluated parameter inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Enforced checks abort the run; the others are diagnostics.
    pub enforced: bool,
}

impl ConditionCheck {
    pub fn holds(&self) -> bool {
        self.holds_within(1e-10)
    }

    pub fn holds_within(&self, rel: f64) -> bool {
        self.lhs <= self.rhs + rel * self.rhs.abs()
    }
}

/// Parameter pack of a minimax catalyst run.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxRecipe<S> {
    pub kind: InnerKind,
    pub outer_iters: usize,
    pub inner_steps: usize,
    pub lipschitz: S,
    /// Primal modulus used in the `x̄` update.
    pub mu_p: S,
    pub mu_d: S,
    pub sigma: S,
    /// `D_Y`; required by the stochastic recipe.
    pub dual_diameter: Option<S>,
    /// Assumed `[f(x̃₀) − f*]/‖x* − x̃₀‖²`; adds `ε ≤ 1/(2·ratio)` to the checks.
    pub gap_ratio: Option<S>,
}

fn log_pos<S: Scalar>(v: S) -> S {
    v.ln().max(S::zero())
}

impl<S: Scalar> MinimaxRecipe<S> {
    pub fn gamma(&self, k: usize) -> S {
        S::of(2.0) / S::of_usize(k + 1)
    }

    pub fn beta(&self, k: usize) -> S {
        let c = match self.kind {
            InnerKind::Deterministic => 2.0,
            InnerKind::Stochastic => 4.0,
        };
        self.mu_d * S::of_usize(k + 1) / (S::of(c) * S::of_usize(k + 2))
    }

    /// REG step `(k+2)/(3(k+1)L)` or SREG cap `η̄ = (k+2)/(24(k+1)L)`.
    pub fn step(&self, k: usize) -> S {
        let c = match self.kind {
            InnerKind::Deterministic => 3.0,
            InnerKind::Stochastic => 24.0,
        };
        S::of_usize(k + 2) / (S::of(c) * S::of_usize(k + 1) * self.lipschitz)
    }

    /// Weight `c` of the composite metric `f(x̃) − f* + c‖ỹ* − y‖²`.
    pub fn composite_weight(&self) -> S {
        match self.kind {
            InnerKind::Deterministic => self.mu_d / S::of(6.0),
            InnerKind::Stochastic => self.mu_d / S::of(12.0),
        }
    }

    /// Inner configuration of iteration `k` (stochastic recipes).
    pub fn asym_config(&self, k: usize) -> Result<AsymConfig<S>> {
        let dual_diameter = self
            .dual_diameter
            .ok_or_else(|| Error::Configuration("stochastic minimax recipe needs the dual diameter D_Y".into()))?;
        Ok(AsymConfig {
            mu_x: self.beta(k),
            mu_y: self.mu_d,
            eta_bar: self.step(k),
            steps: self.inner_steps,
            mu_x_upper: self.mu_d / S::of(4.0),
            mu_x_lower: self.mu_d / S::of(6.0),
            lipschitz: S::of(2.0) * self.lipschitz,
            dual_diameter,
        })
    }

    /// Certificate the inner solver will report at iteration `k`.
    pub fn certificate(&self, k: usize) -> Result<InexactnessCertificate<S>> {
        let b = self.beta(k);
        let t = S::of_usize(self.inner_steps);
        Ok(match self.kind {
            InnerKind::Deterministic => {
                InexactnessCertificate::extragradient(t * (b * self.step(k)).ln_1p(), S::zero(), b)
            }
            InnerKind::Stochastic => {
                let cfg = self.asym_config(k)?;
                let eta = cfg.step_size(self.sigma);
                InexactnessCertificate::asymmetric(
                    t * (b * eta).ln_1p(),
                    t * (b * cfg.eta_bar).ln_1p(),
                    cfg.delta(self.sigma),
                    b,
                )
            }
        })
    }

    /// Oracle calls of one run, `2KT`.
    pub fn sfo_calls(&self) -> u64 {
        2 * self.outer_iters as u64 * self.inner_steps as u64
    }

    /// `Γ₁ = 1`, `Γ_k = Γ_{k−1}(1 − γ_k + 4ε_k/μ_d)/(1 − 4ε_k/μ_d)`.
    pub fn gamma_product(&self, k: usize) -> Result<S> {
        let mut g = S::one();
        for j in 2..=k {
            let e4 = S::of(4.0) * self.certificate(j)?.scaled_epsilon() / self.mu_d;
            g = g * (S::one() - self.gamma(j) + e4) / (S::one() - e4);
        }
        Ok(g)
    }

    /// `12/K²·[2μ_d‖x* − x̃₀‖² + μ_d‖ỹ₀* − y₀‖²]`.
    pub fn composite_bound(&self, dist_x_sq: S, dist_y_sq: S) -> S {
        let k = S::of_usize(self.outer_iters);
        S::of(12.0) / (k * k) * (S::of(2.0) * self.mu_d * dist_x_sq + self.mu_d * dist_y_sq)
    }

    /// Evaluates every parameter inequality for `k ≤ K`.
    ///
    /// Enforced: `γ₁ = 1`, `ε ≤ 1/12`, `ε ≤ 1/((K+1)(K+2))`, `ε ≤ 1/(2·ratio)`
    /// when a gap ratio is set, `ε′ ≤ 1`, `4μ_X ≤ μ_Y`, `η̄ ≤ 1/(2L_ψ)`, and the
    /// pairing condition `ε_{k+1}/α_k ≤ (1 − γ_{k+1} + 4ε_{k+1}/μ_d)/(2(1 − 4ε_k/μ_d))`.
    /// Reported only: the weight condition
    /// `(β_{k+1} + ε′_{k+1})γ_{k+1}²/(1 − γ_{k+1} + 4ε_{k+1}/μ_d) ≤
    /// (α_kγ_k² + γ_k(1−γ_k)μ_p)/(1 − 4ε_k/μ_d)`.
    pub fn conditions(&self) -> Result<Vec<ConditionCheck>> {
        let kk = self.outer_iters;
        let mut out = Vec::new();
        let f = |v: S| v.as_f64();
        out.push(ConditionCheck {
            name: "gamma_1 = 1",
            k: 1,
            lhs: f((self.gamma(1) - S::one()).abs()),
            rhs: 0.0,
            enforced: true,
        });
        let certs = (1..=kk).map(|k| self.certificate(k)).collect::<Result<Vec<_>>>()?;
        let cap = S::one() / S::of_usize((kk + 1) * (kk + 2));
        for (i, c) in certs.iter().enumerate() {
            let k = i + 1;
            out.push(ConditionCheck {
                name: "eps <= 1/12",
                k,
                lhs: f(c.epsilon),
                rhs: 1.0 / 12.0,
                enforced: true,
            });
            out.push(ConditionCheck {
                name: "eps <= 1/((K+1)(K+2))",
                k,
                lhs: f(c.epsilon),
                rhs: f(cap),
                enforced: true,
            });
            if let Some(ratio) = self.gap_ratio {
                out.push(ConditionCheck {
                    name: "eps <= 1/(2 gap_ratio)",
                    k,
                    lhs: f(c.epsilon),
                    rhs: f(S::one() / (S::of(2.0) * ratio)),
                    enforced: true,
                });
            }
            if let Some(ep) = c.epsilon_prime {
                out.push(ConditionCheck {
                    name: "eps' <= 1",
                    k,
                    lhs: f(ep),
                    rhs: 1.0,
                    enforced: true,
                });
            }
            if self.kind == InnerKind::Stochastic {
                let cfg = self.asym_config(k)?;
                out.push(ConditionCheck {
                    name: "4 mu_X <= mu_Y",
                    k,
                    lhs: f(S::of(4.0) * cfg.mu_x),
                    rhs: f(cfg.mu_y),
                    enforced: true,
                });
                out.push(ConditionCheck {
                    name: "eta_bar <= 1/(2 L_psi)",
                    k,
                    lhs: f(cfg.eta_bar),
                    rhs: f(S::one() / (S::of(2.0) * cfg.lipschitz)),
                    enforced: true,
                });
            }
        }
        for k in 1..kk {
            let (c, n) = (&certs[k - 1], &certs[k]);
            let (g, gn) = (self.gamma(k), self.gamma(k + 1));
            let e4 = S::of(4.0) * c.scaled_epsilon() / self.mu_d;
            let e4n = S::of(4.0) * n.scaled_epsilon() / self.mu_d;
            let alpha = c.scaled_alpha();
            out.push(ConditionCheck {
                name: "weight condition (beta+eps')gamma^2 vs alpha gamma^2",
                k,
                lhs: f((self.beta(k + 1) + n.scaled_epsilon_prime()) * gn * gn / (S::one() - gn + e4n)),
                rhs: f((alpha * g * g + g * (S::one() - g) * self.mu_p) / (S::one() - e4)),
                enforced: false,
            });
            out.push(ConditionCheck {
                name: "pairing condition eps_(k+1)/alpha_k",
                k,
                lhs: f(n.scaled_epsilon() / alpha),
                rhs: f((S::one() - gn + e4n) / (S::of(2.0) * (S::one() - e4))),
                enforced: true,
            });
        }
        Ok(out)
    }

    /// Runs [`MinimaxRecipe::conditions`] and fails on the first enforced
    /// inequality that does not hold.
    pub fn self_check(&self) -> Result<Vec<ConditionCheck>> {
        let checks = self.conditions()?;
        let rel = 1e-10f64.max(64.0 * S::epsilon().as_f64());
        if let Some(bad) = checks.iter().find(|c| c.enforced && !c.holds_within(rel)) {
            return Err(Error::Configuration(format!(
                "{} fails at k={}: {} > {}",
                bad.name, bad.k, bad.lhs, bad.rhs
            )));
        }
        Ok(checks)
    }
}

fn moduli<S: Scalar, P: SaddleObjective<S> + ?Sized>(prob: &P) -> Result<(S, S, S)> {
    let (l, mp, md) = (prob.lipschitz(), prob.primal_modulus(), prob.dual_modulus());
    if !(md > S::zero()) {
        return Err(Error::Configuration(
            "minimax catalyst needs mu_d > 0 (the perturbation reduction is not provided)".into(),
        ));
    }
    Ok((l, mp, md))
}

/// Smallest `T` with `c/((1 + r)^T − 1) ≤ m`.
fn min_steps<S: Scalar>(c: S, m: S, r: S) -> usize {
    ((S::one() + c / m).ln() / r.ln_1p())
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
}

fn outer_iters<S: Scalar>(horizon: Horizon<S>, c: f64) -> Result<usize> {
    match horizon {
        Horizon::Iterations(k) if k > 0 => Ok(k),
        Horizon::Iterations(_) => Err(Error::param("outer_iters", "must be positive")),
        Horizon::Accuracy { epsilon, potential } => {
            if !(epsilon > S::zero()) || !(potential > S::zero()) {
                return Err(Error::param("epsilon", "accuracy and potential must be positive"));
            }
            Ok((S::of(c) * potential / epsilon)
                .sqrt()
                .ceil()
                .to_usize()
                .unwrap_or(usize::MAX)
                .max(1))
        }
    }
}

fn accuracy_cap<S: Scalar>(k: usize, gap_ratio: Option<S>) -> S {
    let mut m = (S::one() / S::of(12.0)).min(S::one() / S::of_usize((k + 1) * (k + 2)));
    if let Some(r) = gap_ratio {
        m = m.min(S::one() / (S::of(2.0) * r));
    }
    m
}

fn det_steps<S: Scalar>(l: S, md: S, k: usize, gap_ratio: Option<S>) -> usize {
    let kk = S::of_usize(k);
    let mut bracket = S::of(12.0).ln() + (S::of(6.0) * kk * kk).ln();
    if let Some(r) = gap_ratio {
        bracket += log_pos(S::of(2.0) * r);
    }
    let stated = (S::of(6.0) * l / md * bracket).ceil().to_usize().unwrap_or(usize::MAX);
    stated.max(min_steps(S::one(), accuracy_cap(k, gap_ratio), md / (S::of(6.0) * l)))
}

/// Deterministic recipe: `K` from the horizon (`K = ⌈√(12·potential/ε)⌉`),
/// `T ≥ (6L/μ_d)[log 12 + log(6K²) + log(2·ratio)]`, raised if needed to the
/// smallest `T` meeting the inexactness caps.
pub fn recipe_det<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    horizon: Horizon<S>,
    gap_ratio: Option<S>,
) -> Result<MinimaxRecipe<S>> {
    let (l, mp, md) = moduli(prob)?;
    let k = outer_iters(horizon, 12.0)?;
    if let Some(r) = gap_ratio {
        if !(r > S::zero()) {
            return Err(Error::param("gap_ratio", "must be positive"));
        }
    }
    Ok(MinimaxRecipe {
        kind: InnerKind::Deterministic,
        outer_iters: k,
        inner_steps: det_steps(l, md, k, gap_ratio),
        lipschitz: l,
        mu_p: mp,
        mu_d: md,
        sigma: S::zero(),
        dual_diameter: prob.dual_diameter(),
        gap_ratio,
    })
}

fn stoch_deterministic_part<S: Scalar>(l: S, md: S, k: usize) -> S {
    let kk = S::of_usize(k);
    S::of(288.0) * l / md * (S::of(96.0).ln() + (S::of(48.0) * kk * kk).ln())
}

/// Stochastic recipe (`σ > 0`; `σ = 0` falls back to [`recipe_det`]):
/// `K = ⌈√(24·potential/ε)⌉` and `T` as a deterministic part plus two noise terms.
pub fn recipe_stoch<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    epsilon: S,
    potential: S,
    gap_ratio: Option<S>,
) -> Result<MinimaxRecipe<S>> {
    let (l, mp, md) = moduli(prob)?;
    let sigma = prob.noise();
    if sigma <= S::zero() {
        return recipe_det(prob, Horizon::Accuracy { epsilon, potential }, gap_ratio);
    }
    let d = prob
        .dual_diameter()
        .ok_or_else(|| Error::Configuration("stochastic minimax recipe needs the dual diameter D_Y".into()))?;
    let k = outer_iters(Horizon::Accuracy { epsilon, potential }, 24.0)?;
    let kk = S::of_usize(k);
    let s2 = sigma * sigma;
    let mut t = stoch_deterministic_part(l, md, k);
    if let Some(r) = gap_ratio {
        t += S::of(288.0) * l / md * log_pos(S::of(16.0) * r);
    }
    let noise_a = S::of(24756.0) * s2 * ((md * md * d * d / s2).ln() + S::of(2.0)) * kk / (epsilon * md);
    let c = S::of(49152.0) * s2 * kk / (md * epsilon);
    t += noise_a.max(S::zero()) + c * c.ln().max(S::one());
    let stated = t.ceil().to_usize().unwrap_or(usize::MAX);
    let floor = min_steps(S::of(4.0), accuracy_cap(k, gap_ratio), md / (S::of(96.0) * l));
    Ok(MinimaxRecipe {
        kind: InnerKind::Stochastic,
        outer_iters: k,
        inner_steps: stated.max(floor).max(2),
        lipschitz: l,
        mu_p: mp,
        mu_d: md,
        sigma,
        dual_diameter: Some(d),
        gap_ratio,
    })
}

/// Epoch plan of the restarted scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartedMinimaxRecipe<S> {
    /// Epoch template; `inner_steps` is replaced by `epoch_steps[e − 1]`.
    pub epoch: MinimaxRecipe<S>,
    pub epoch_steps: Vec<usize>,
    /// `Δ₀` estimate the stochastic plan was built from.
    pub initial_gap: Option<S>,
}

impl<S: Scalar> RestartedMinimaxRecipe<S> {
    pub fn epochs(&self) -> usize {
        self.epoch_steps.len()
    }

    pub fn epoch_recipe(&self, e: usize) -> MinimaxRecipe<S> {
        let mut r = self.epoch.clone();
        r.inner_steps = self.epoch_steps[e - 1];
        r
    }

    /// Total oracle calls, `Σ_e 2KT_e`.
    pub fn sfo_calls(&self) -> u64 {
        self.epoch_steps
            .iter()
            .map(|&t| 2 * self.epoch.outer_iters as u64 * t as u64)
            .sum()
    }

    /// Noise target `Δ₀2^{−e}/(128K)` of epoch `e` (stochastic plans).
    pub fn delta_target(&self, e: usize) -> Option<S> {
        self.initial_gap
            .map(|g| g * S::of(2.0).powi(-(e as i32)) / (S::of(128.0) * S::of_usize(self.epoch.outer_iters)))
    }
}

/// `E = ⌈log₂(Δ₀/ε)⌉`, at least one.
pub fn epochs_for_accuracy<S: Scalar>(initial_gap: S, epsilon: S) -> Result<usize> {
    if !(epsilon > S::zero()) || !(initial_gap > S::zero()) {
        return Err(Error::param("epsilon", "accuracy and initial gap must be positive"));
    }
    Ok((initial_gap / epsilon)
        .log2()
        .ceil()
        .max(S::one())
        .to_usize()
        .unwrap_or(1))
}

fn require_sc<S: Scalar>(mp: S) -> Result<()> {
    if mp > S::zero() {
        Ok(())
    } else {
        Err(Error::Configuration(
            "restarted minimax catalyst needs mu_p > 0; use catalyst_minimax_run for mu_p = 0".into(),
        ))
    }
}

/// Deterministic restarted plan: `K = ⌈12√(μ_d/μ_p)⌉` and
/// `T ≥ (6L/μ_d)[log 12 + log(6K²)]` in every epoch.
pub fn restarted_det<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    epochs: usize,
) -> Result<RestartedMinimaxRecipe<S>> {
    let (_, mp, md) = moduli(prob)?;
    require_sc(mp)?;
    if epochs == 0 {
        return Err(Error::param("epochs", "must be positive"));
    }
    let k = (S::of(12.0) * (md / mp).sqrt()).ceil().to_usize().unwrap_or(usize::MAX);
    let epoch = recipe_det(prob, Horizon::Iterations(k), None)?;
    Ok(RestartedMinimaxRecipe {
        epoch_steps: vec![epoch.inner_steps; epochs],
        epoch,
        initial_gap: None,
    })
}

/// Stochastic restarted plan: `K = ⌈24√(μ_d/μ_p)⌉` and the noise-driven `T_e`
/// built from `Δ₀ = f(x̃₍₀₎) − f* + (μ_d/12)‖ỹ₍₀₎* − y₍₀₎‖²`.
pub fn restarted_stoch<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    epochs: usize,
    initial_gap: S,
) -> Result<RestartedMinimaxRecipe<S>> {
    let (l, mp, md) = moduli(prob)?;
    require_sc(mp)?;
    let sigma = prob.noise();
    if sigma <= S::zero() {
        return restarted_det(prob, epochs);
    }
    if epochs == 0 {
        return Err(Error::param("epochs", "must be positive"));
    }
    if !(initial_gap > S::zero()) {
        return Err(Error::param("initial_gap", "must be positive"));
    }
    let d = prob
        .dual_diameter()
        .ok_or_else(|| Error::Configuration("stochastic minimax recipe needs the dual diameter D_Y".into()))?;
    let k = (S::of(24.0) * (md / mp).sqrt()).ceil().to_usize().unwrap_or(usize::MAX);
    let kk = S::of_usize(k);
    let s2 = sigma * sigma;
    let base = stoch_deterministic_part(l, md, k);
    let floor = min_steps(S::of(4.0), accuracy_cap::<S>(k, None), md / (S::of(96.0) * l));
    let epoch_steps = (1..=epochs)
        .map(|e| {
            let two_e = S::of(2.0).powi(e as i32);
            let a = S::of(192.0) * s2 * ((md * md * d * d / s2).ln() + S::of(2.0)) / md;
            let lg = ((S::of(49152.0) * kk * s2 / initial_gap).ln() + S::of_usize(e) * S::of(2.0).ln()).max(S::one());
            let b = S::of(384.0) * s2 * lg / md;
            let t = base + S::of(128.0) * kk * two_e / initial_gap * (a.max(S::zero()) + b);
            t.ceil().to_usize().unwrap_or(usize::MAX).max(floor).max(2)
        })
        .collect::<Vec<_>>();
    let epoch = MinimaxRecipe {
        kind: InnerKind::Stochastic,
        outer_iters: k,
        inner_steps: epoch_steps[0],
        lipschitz: l,
        mu_p: mp,
        mu_d: md,
        sigma,
        dual_diameter: Some(d),
        gap_ratio: None,
    };
    Ok(RestartedMinimaxRecipe {
        epoch,
        epoch_steps,
        initial_gap: Some(initial_gap),
    })
}

/// Final pair `(x̃_K, y_K)`, trace and oracle count of a minimax run.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxRun<S> {
    pub point: PrimalDualPoint<S>,
    pub trace: RunTrace,
    pub sfo_calls: u64,
}

/// Fills gap, distances and the composite metric with weight `weight`.
pub fn composite_metrics<S: Scalar>(
    row: &mut TraceRow,
    reference: &dyn MinimaxReference<S>,
    x: &[S],
    y: &[S],
    weight: S,
) -> Result<()> {
    let gap = reference.primal_value(x) - reference.optimal_value();
    let y_star = reference.inner_argmax(x)?;
    let dy = linalg::dist_sq(&y_star, y);
    row.primal_gap = Some(gap.as_f64());
    row.dist_primal_sq = Some(linalg::dist_sq(x, reference.saddle_point().0).as_f64());
    row.dist_dual_sq = Some(dy.as_f64());
    row.composite_gap = Some((gap + weight * dy).as_f64());
    Ok(())
}

fn check_problem<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    recipe: &MinimaxRecipe<S>,
    z0: &PrimalDualPoint<S>,
) -> Result<()> {
    let (l, mp, md) = moduli(prob)?;
    let (dx, dy) = prob.dims();
    Error::check_dim("minimax catalyst primal block", dx, z0.split())?;
    Error::check_dim("minimax catalyst start", dx + dy, z0.coords().len())?;
    if recipe.lipschitz < l || recipe.mu_p > mp || recipe.mu_d > md {
        return Err(Error::Configuration(format!(
            "recipe constants (L={}, mu_p={}, mu_d={}) are not valid for the problem (L={l}, mu_p={mp}, mu_d={md})",
            recipe.lipschitz, recipe.mu_p, recipe.mu_d
        )));
    }
    if recipe.kind == InnerKind::Stochastic && recipe.sigma < prob.noise() {
        return Err(Error::Configuration(format!(
            "recipe sigma {} is below the problem's noise level {}",
            recipe.sigma,
            prob.noise()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn outer_loop<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    recipe: &MinimaxRecipe<S>,
    z0: &PrimalDualPoint<S>,
    stream: &mut OracleStream,
    sfo_start: u64,
    trace: Option<&mut RunTrace>,
    reference: Option<&dyn MinimaxReference<S>>,
    weight: S,
) -> Result<(PrimalDualPoint<S>, u64)> {
    let clock = Instant::now();
    let mut trace = trace;
    let seed = stream.seed();
    let split = z0.split();
    let mut x_bar = z0.x().to_vec();
    let mut x_tilde = z0.x().to_vec();
    let mut y = z0.y().to_vec();
    let mut x_hat = vec![S::zero(); split];
    let mut sfo = sfo_start;
    let mu = recipe.mu_p;
    for k in 1..=recipe.outer_iters {
        let (g, b) = (recipe.gamma(k), recipe.beta(k));
        for i in 0..split {
            x_hat[i] = g * x_bar[i] + (S::one() - g) * x_tilde[i];
        }
        let sub = SaddleSubproblem::new(prob, b, x_hat.clone())?;
        let start = PrimalDualPoint::from_vec_unchecked([x_hat.as_slice(), y.as_slice()].concat(), split);
        let out: SolverOutput<S, PrimalDualPoint<S>> = match recipe.kind {
            InnerKind::Deterministic => reg(&sub, b, &start, recipe.inner_steps, Stepsize::Constant(recipe.step(k)))?,
            InnerKind::Stochastic => sreg_asym(&sub, &recipe.asym_config(k)?, &start, stream)?,
        };
        sfo += out.sfo_calls;
        let a = out.certificate.scaled_alpha();
        let denom = a * g + mu * (S::one() - g);
        let x_last = out.last.x();
        for i in 0..split {
            x_bar[i] = (a * x_last[i] + (mu - a) * (S::one() - g) * x_tilde[i]) / denom;
        }
        x_tilde = out.ergodic.x().to_vec();
        y = out.last.y().to_vec();
        if !linalg::all_finite(&x_bar) {
            return Err(Error::NonFinite("minimax catalyst iterate"));
        }
        if let Some(t) = trace.as_deref_mut() {
            let mut row = TraceRow::new(seed, k as u64, sfo);
            if let Some(r) = reference {
                composite_metrics(&mut row, r, &x_tilde, &y, weight)?;
            }
            row.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
            t.push(row);
        }
    }
    let point = PrimalDualPoint::from_vec_unchecked([x_tilde, y].concat(), split);
    Ok((point, sfo))
}

fn initial_row<S: Scalar>(
    seed: u64,
    z0: &PrimalDualPoint<S>,
    reference: Option<&dyn MinimaxReference<S>>,
    weight: S,
) -> Result<TraceRow> {
    let mut row = TraceRow::new(seed, 0, 0);
    if let Some(r) = reference {
        composite_metrics(&mut row, r, z0.x(), z0.y(), weight)?;
    }
    Ok(row)
}

/// Minimax catalyst: `x̂_k = γ_k x̄_{k−1} + (1−γ_k)x̃_{k−1}`, inner solve of
/// `F + (β_k/2)‖x − x̂_k‖²` from `(x̂_k, y_{k−1})`, then
/// `x̄_k = [α_k x_k + (μ_p − α_k)(1−γ_k)x̃_{k−1}]/(α_kγ_k + μ_p(1−γ_k))`.
/// Returns `(x̃_K, y_K)`.
pub fn catalyst_minimax_run<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    recipe: &MinimaxRecipe<S>,
    z0: &PrimalDualPoint<S>,
    stream: &mut OracleStream,
    reference: Option<&dyn MinimaxReference<S>>,
) -> Result<MinimaxRun<S>> {
    check_problem(prob, recipe, z0)?;
    recipe.self_check()?;
    let weight = recipe.composite_weight();
    let mut trace = RunTrace::default();
    trace.push(initial_row(stream.seed(), z0, reference, weight)?);
    let (point, sfo) = outer_loop(prob, recipe, z0, stream, 0, Some(&mut trace), reference, weight)?;
    Ok(MinimaxRun {
        point,
        trace,
        sfo_calls: sfo,
    })
}

/// Restarted minimax catalyst: epoch `e` runs the catalyst from `z₍ₑ₋₁₎`
/// with `T_e` inner steps. The trace has one row per epoch.
pub fn r_catalyst_minimax_run<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    recipe: &RestartedMinimaxRecipe<S>,
    z0: &PrimalDualPoint<S>,
    stream: &mut OracleStream,
    reference: Option<&dyn MinimaxReference<S>>,
) -> Result<MinimaxRun<S>> {
    require_sc(prob.primal_modulus())?;
    for e in 1..=recipe.epochs() {
        let r = recipe.epoch_recipe(e);
        check_problem(prob, &r, z0)?;
        r.self_check()?;
    }
    let clock = Instant::now();
    let weight = recipe.epoch.composite_weight();
    let mut trace = RunTrace::default();
    trace.push(initial_row(stream.seed(), z0, reference, weight)?);
    let mut z = z0.clone();
    let mut sfo = 0;
    for e in 1..=recipe.epochs() {
        let r = recipe.epoch_recipe(e);
        let (next, total) = outer_loop(prob, &r, &z, stream, sfo, None, reference, weight)?;
        z = next;
        sfo = total;
        let mut row = TraceRow::new(stream.seed(), e as u64, sfo);
        if let Some(rf) = reference {
            composite_metrics(&mut row, rf, z.x(), z.y(), weight)?;
        }
        row.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        trace.push(row);
    }
    Ok(MinimaxRun {
        point: z,
        trace,
        sfo_calls: sfo,
    })
}
