use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{add_noise, SaddleObjective};
use crate::oracle::OracleStream;
use crate::point::PrimalDualPoint;
use crate::Scalar;

use super::{InexactnessCertificate, SolverOutput};

/// Step-size schedule of the extragradient family, indexed from `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepsize<S> {
    Constant(S),
    /// `η_t = 2/(μ(t + t₀ + 1))`
    Decaying {
        mu: S,
        offset: usize,
    },
}

impl<S: Scalar> Stepsize<S> {
    /// The SREG schedule `t₀ = 4⌈L/μ⌉`, `η_t = 2/(μ(t + t₀ + 1))`.
    pub fn sreg_default(mu: S, lipschitz: S) -> Self {
        let offset = 4 * (lipschitz / mu).ceil().to_usize().unwrap_or(usize::MAX / 8);
        Stepsize::Decaying { mu, offset }
    }

    pub fn at(&self, t: usize) -> S {
        match *self {
            Stepsize::Constant(eta) => eta,
            Stepsize::Decaying { mu, offset } => S::of(2.0) / (mu * S::of_usize(t + offset + 1)),
        }
    }

    /// Largest step of the schedule (its first one).
    pub fn max(&self) -> S {
        self.at(0)
    }

    pub fn offset(&self) -> Option<usize> {
        match *self {
            Stepsize::Constant(_) => None,
            Stepsize::Decaying { offset, .. } => Some(offset),
        }
    }
}

/// Parameters of the asymmetric SREG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymConfig<S> {
    /// Primal anchor weight `μ_X`.
    pub mu_x: S,
    /// Dual anchor weight `μ_Y`.
    pub mu_y: S,
    /// Step cap `η̄`.
    pub eta_bar: S,
    pub steps: usize,
    /// Upper bound `μ̄_X ≥ μ_X` entering the step-size rule.
    pub mu_x_upper: S,
    /// Lower bound `μ̲_X ≤ μ_X`.
    pub mu_x_lower: S,
    /// Smoothness bound `L_ψ` of the subproblem.
    pub lipschitz: S,
    /// Dual diameter `D_Y`.
    pub dual_diameter: S,
}

impl<S: Scalar> AsymConfig<S> {
    /// `η = min{η̄, q log T/(μ_X T)}` (or `η̄` when `σ = 0`).
    pub fn step_size(&self, sigma: S) -> S {
        if sigma <= S::zero() || self.steps < 2 {
            return self.eta_bar;
        }
        let log_t = S::of_usize(self.steps).ln();
        let ratio = (self.mu_x_upper * self.dual_diameter / sigma).powi(2).ln();
        let q = (S::of(2.0) * (ratio + log_t) / log_t).max(S::one() / log_t);
        self.eta_bar.min(q * log_t / (self.mu_x * S::of_usize(self.steps)))
    }

    /// The noise term `δ = 16σ²(log(μ̄²D²/σ²) + log T + 2)/(μ_X T)`.
    pub fn delta(&self, sigma: S) -> S {
        if sigma <= S::zero() {
            return S::zero();
        }
        let log_t = S::of_usize(self.steps).ln();
        let ratio = (self.mu_x_upper * self.dual_diameter / sigma).powi(2).ln();
        S::of(16.0) * sigma * sigma * (ratio + log_t + S::of(2.0)) / (self.mu_x * S::of_usize(self.steps))
    }
}

struct Trajectory<S> {
    ergodic: Vec<S>,
    last: Vec<S>,
    sfo: u64,
    ln_lambda: S,
    /// `Σ η_t² Λ_t / Λ_T`
    sq_steps: S,
}

/// Shared loop of REG, SREG and the asymmetric SREG.
///
/// `weight_mu` drives the `Λ` recursion; `mu_x`/`mu_y` are the anchor weights
/// of the second step on each block.
#[allow(clippy::too_many_arguments)]
fn run<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    z0: &[S],
    steps: usize,
    schedule: impl Fn(usize) -> S,
    mu_x: S,
    mu_y: S,
    weight_mu: S,
    mut stream: Option<&mut OracleStream>,
) -> Trajectory<S> {
    let (dx, dy) = prob.dims();
    let n = dx + dy;
    let sigma = prob.noise();
    let (set_x, set_y) = (prob.primal_set(), prob.dual_set());

    let mut z = z0.to_vec();
    let mut zh = vec![S::zero(); n];
    let mut g = vec![S::zero(); n];
    let mut scratch = vec![S::zero(); n];
    let mut avg = z0.to_vec();
    let mut inv_lambda = S::one();
    let mut ln_lambda = S::zero();
    let mut sq_steps = S::zero();
    let mut sfo = 0u64;

    for t in 0..steps {
        let eta = schedule(t);

        prob.operator_into(&z, &mut g);
        if let Some(s) = stream.as_deref_mut() {
            add_noise(sigma, s, &mut g, &mut scratch);
        }
        sfo += 1;
        for i in 0..n {
            zh[i] = z[i] - eta * g[i];
        }
        set_x.project_in_place(&mut zh[..dx]);
        set_y.project_in_place(&mut zh[dx..]);

        prob.operator_into(&zh, &mut g);
        if let Some(s) = stream.as_deref_mut() {
            add_noise(sigma, s, &mut g, &mut scratch);
        }
        sfo += 1;
        let (den_x, den_y) = (S::one() + eta * mu_x, S::one() + eta * mu_y);
        for i in 0..dx {
            z[i] = (z[i] + eta * (mu_x * zh[i] - g[i])) / den_x;
        }
        for i in dx..n {
            z[i] = (z[i] + eta * (mu_y * zh[i] - g[i])) / den_y;
        }
        set_x.project_in_place(&mut z[..dx]);
        set_y.project_in_place(&mut z[dx..]);

        // Λ_{t+1} = Λ_t (1 + μη_t); the running share of ẑ_t in the average
        // is μη_tΛ_t / (Λ_{t+1} − 1).
        let growth = weight_mu * eta;
        let share = growth / (S::one() + growth - inv_lambda);
        linalg::blend_into(&mut avg, &zh, share);
        inv_lambda /= S::one() + growth;
        ln_lambda += growth.ln_1p();
        sq_steps = (sq_steps + eta * eta) / (S::one() + growth);
    }

    Trajectory {
        ergodic: avg,
        last: z,
        sfo,
        ln_lambda,
        sq_steps,
    }
}

fn check_start<S: Scalar, P: SaddleObjective<S> + ?Sized>(prob: &P, z0: &PrimalDualPoint<S>) -> Result<()> {
    let (dx, dy) = prob.dims();
    Error::check_dim("extragradient primal block", dx, z0.split())?;
    Error::check_dim("extragradient start", dx + dy, z0.coords().len())
}

fn check_regularization<S: Scalar, P: SaddleObjective<S> + ?Sized>(prob: &P, mu: S) -> Result<()> {
    if !(mu > S::zero()) {
        return Err(Error::param("mu", format!("must be positive, got {mu}")));
    }
    let modulus = prob.primal_modulus().min(prob.dual_modulus());
    if mu > modulus * (S::one() + S::of(1e-12)) {
        return Err(Error::RecipeViolation(format!(
            "regularization {mu} exceeds the strong monotonicity modulus {modulus}"
        )));
    }
    Ok(())
}

fn finish<S: Scalar>(
    traj: Trajectory<S>,
    split: usize,
    cert: InexactnessCertificate<S>,
) -> SolverOutput<S, PrimalDualPoint<S>> {
    SolverOutput {
        ergodic: PrimalDualPoint::from_vec_unchecked(traj.ergodic, split),
        last: PrimalDualPoint::from_vec_unchecked(traj.last, split),
        sfo_calls: traj.sfo,
        certificate: cert,
    }
}

/// Regularized extragradient with exact operator evaluations.
///
/// Requires `η_t ≤ 1/L` and `0 < μ ≤ min(μ_p, μ_d)`.
pub fn reg<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    mu: S,
    z0: &PrimalDualPoint<S>,
    steps: usize,
    schedule: Stepsize<S>,
) -> Result<SolverOutput<S, PrimalDualPoint<S>>> {
    check_start(prob, z0)?;
    check_regularization(prob, mu)?;
    let l = prob.lipschitz();
    if schedule.max() * l > S::one() + S::of(1e-12) {
        return Err(Error::RecipeViolation(format!(
            "REG step {} exceeds 1/L = {}",
            schedule.max(),
            S::one() / l
        )));
    }
    if steps == 0 {
        return Err(Error::param("steps", "must be positive"));
    }
    let traj = run(prob, z0.coords(), steps, |t| schedule.at(t), mu, mu, mu, None);
    let cert = InexactnessCertificate::extragradient(traj.ln_lambda, S::zero(), mu);
    Ok(finish(traj, z0.split(), cert))
}

/// Stochastic regularized extragradient: two independent oracle draws per
/// step and `Lη_t ≤ 1/2`.
pub fn sreg<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    mu: S,
    z0: &PrimalDualPoint<S>,
    steps: usize,
    schedule: Stepsize<S>,
    stream: &mut OracleStream,
) -> Result<SolverOutput<S, PrimalDualPoint<S>>> {
    check_start(prob, z0)?;
    check_regularization(prob, mu)?;
    let l = prob.lipschitz();
    if schedule.max() * l > S::of(0.5) * (S::one() + S::of(1e-12)) {
        return Err(Error::RecipeViolation(format!(
            "SREG step {} violates L*eta <= 1/2 with L = {l}",
            schedule.max()
        )));
    }
    if steps == 0 {
        return Err(Error::param("steps", "must be positive"));
    }
    let sigma = prob.noise();
    let traj = run(prob, z0.coords(), steps, |t| schedule.at(t), mu, mu, mu, Some(stream));
    // δ = 8μσ² Σ η_t²Λ_t / (Λ_T − 1)
    let delta = S::of(8.0) * mu * sigma * sigma * traj.sq_steps / -(-traj.ln_lambda).exp_m1();
    let cert = InexactnessCertificate::extragradient(traj.ln_lambda, delta, mu);
    Ok(finish(traj, z0.split(), cert))
}

/// SREG with separate anchor weights `μ_X` on `x` and `μ_Y` on `y` and the
/// constant step `η = min{η̄, q log T/(μ_X T)}`.
pub fn sreg_asym<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    cfg: &AsymConfig<S>,
    z0: &PrimalDualPoint<S>,
    stream: &mut OracleStream,
) -> Result<SolverOutput<S, PrimalDualPoint<S>>> {
    check_start(prob, z0)?;
    let tol = S::one() + S::of(1e-12);
    if !(cfg.mu_x > S::zero()) || S::of(4.0) * cfg.mu_x > cfg.mu_y * tol {
        return Err(Error::RecipeViolation(format!(
            "asymmetric SREG needs 0 < 4*mu_X <= mu_Y, got mu_X={}, mu_Y={}",
            cfg.mu_x, cfg.mu_y
        )));
    }
    if cfg.mu_x > prob.primal_modulus() * tol || cfg.mu_y > prob.dual_modulus() * tol {
        return Err(Error::RecipeViolation(format!(
            "anchor weights ({}, {}) exceed the subproblem moduli ({}, {})",
            cfg.mu_x,
            cfg.mu_y,
            prob.primal_modulus(),
            prob.dual_modulus()
        )));
    }
    if prob.lipschitz() > cfg.lipschitz * tol {
        return Err(Error::RecipeViolation(format!(
            "declared L_psi = {} is below the subproblem's L = {}",
            cfg.lipschitz,
            prob.lipschitz()
        )));
    }
    if !(cfg.eta_bar > S::zero()) || cfg.eta_bar * S::of(2.0) * cfg.lipschitz > tol {
        return Err(Error::RecipeViolation(format!(
            "eta_bar = {} violates eta_bar <= 1/(2 L_psi)",
            cfg.eta_bar
        )));
    }
    if cfg.mu_x_upper < cfg.mu_x || cfg.mu_x_lower > cfg.mu_x {
        return Err(Error::RecipeViolation(format!(
            "need mu_lower <= mu_X <= mu_upper, got {} <= {} <= {}",
            cfg.mu_x_lower, cfg.mu_x, cfg.mu_x_upper
        )));
    }
    if cfg.steps == 0 {
        return Err(Error::param("steps", "must be positive"));
    }
    let sigma = prob.noise();
    if sigma > S::zero() && cfg.steps < 2 {
        return Err(Error::param("steps", "need T >= 2 when sigma > 0"));
    }
    let eta = cfg.step_size(sigma);
    let traj = run(
        prob,
        z0.coords(),
        cfg.steps,
        |_| eta,
        cfg.mu_x,
        cfg.mu_y,
        cfg.mu_x,
        Some(stream),
    );
    let ln_bar = S::of_usize(cfg.steps) * (cfg.mu_x * cfg.eta_bar).ln_1p();
    let cert = InexactnessCertificate::asymmetric(traj.ln_lambda, ln_bar, cfg.delta(sigma), cfg.mu_x);
    Ok(finish(traj, z0.split(), cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::FeasibleSet;

    /// F = (μp/2)x² + xy − (μd/2)y² on Ball(0, 10)², optional noise.
    struct Toy {
        mp: f64,
        md: f64,
        sigma: f64,
        set: FeasibleSet<f64>,
    }

    impl SaddleObjective<f64> for Toy {
        fn dims(&self) -> (usize, usize) {
            (1, 1)
        }
        fn value(&self, x: &[f64], y: &[f64]) -> f64 {
            0.5 * self.mp * x[0] * x[0] + x[0] * y[0] - 0.5 * self.md * y[0] * y[0]
        }
        fn grad_x_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
            out[0] = self.mp * x[0] + y[0];
        }
        fn grad_y_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
            out[0] = x[0] - self.md * y[0];
        }
        fn lipschitz(&self) -> f64 {
            nalgebra::Matrix2::new(self.mp, 1.0, -1.0, self.md)
                .singular_values()
                .max()
        }
        fn primal_modulus(&self) -> f64 {
            self.mp
        }
        fn dual_modulus(&self) -> f64 {
            self.md
        }
        fn primal_set(&self) -> &FeasibleSet<f64> {
            &self.set
        }
        fn dual_set(&self) -> &FeasibleSet<f64> {
            &self.set
        }
        fn noise(&self) -> f64 {
            self.sigma
        }
    }

    fn toy(sigma: f64) -> Toy {
        Toy {
            mp: 1.0,
            md: 1.0,
            sigma,
            set: FeasibleSet::origin_ball(1, 10.0).unwrap(),
        }
    }

    fn start(x: f64, y: f64) -> PrimalDualPoint<f64> {
        PrimalDualPoint::from_parts(&[x], &[y]).unwrap()
    }

    #[test]
    fn hand_step() {
        // ẑ = z0 − ηG(z0) with G(1,1) = (2, 0); G(ẑ) = (ẑx + ẑy, ẑy − ẑx);
        // z1 = (z0 + η(ẑ − G(ẑ)))/(1 + η).
        let p = toy(0.0);
        let eta = 1.0 / 2f64.sqrt();
        let out = reg(&p, 1.0, &start(1.0, 1.0), 1, Stepsize::Constant(eta)).unwrap();
        let z = out.last.coords();
        assert!((z[0] - 0.1716).abs() < 1e-4, "{z:?}");
        assert!((z[1] - 0.4142).abs() < 1e-4, "{z:?}");
        // ergodic of a single step is ẑ₀
        assert!((out.ergodic.coords()[0] - (1.0 - 2.0 * eta)).abs() < 1e-15);
        assert!((out.ergodic.coords()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_stays_put() {
        let p = toy(0.0);
        let out = reg(&p, 1.0, &start(0.0, 0.0), 20, Stepsize::Constant(0.5)).unwrap();
        assert_eq!(out.last.coords(), &[0.0, 0.0]);
        assert_eq!(out.ergodic.coords(), &[0.0, 0.0]);
    }

    #[test]
    fn linear_rate_on_toy() {
        let p = toy(0.0);
        let l = p.lipschitz();
        assert!((l - 2f64.sqrt()).abs() < 1e-12);
        let z0 = start(1.0, 1.0);
        for t in 1..=50 {
            let out = reg(&p, 1.0, &z0, t, Stepsize::Constant(1.0 / l)).unwrap();
            let bound = 2.0 * (-(t as f64) * (1.0 / l).ln_1p()).exp();
            assert!(out.last.dist_sq(&[0.0, 0.0]) <= bound, "t={t}");
        }
    }

    #[test]
    fn sreg_noiseless_equals_reg() {
        let p = toy(0.0);
        let sched = Stepsize::sreg_default(1.0, p.lipschitz());
        let z0 = start(3.0, -2.0);
        let a = reg(&p, 1.0, &z0, 64, sched).unwrap();
        let b = sreg(&p, 1.0, &z0, 64, sched, &mut OracleStream::new(4)).unwrap();
        assert_eq!(a.last, b.last);
        assert_eq!(a.ergodic, b.ergodic);
        assert_eq!(b.sfo_calls, 128);
    }

    #[test]
    fn asym_with_equal_weights_is_sreg() {
        let p = toy(0.0);
        let z0 = start(3.0, -2.0);
        let eta_bar = 0.2;
        let cfg = AsymConfig {
            mu_x: 0.25,
            mu_y: 1.0,
            eta_bar,
            steps: 30,
            mu_x_upper: 0.25,
            mu_x_lower: 0.25,
            lipschitz: p.lipschitz(),
            dual_diameter: 20.0,
        };
        // 4μ_X ≤ μ_Y forbids μ_X = μ_Y, so compare against the shared kernel
        let equal = run(&p, z0.coords(), 30, |_| eta_bar, 0.5, 0.5, 0.5, None);
        let b = sreg(&p, 0.5, &z0, 30, Stepsize::Constant(eta_bar), &mut OracleStream::new(0)).unwrap();
        assert_eq!(equal.last, b.last.coords());
        assert_eq!(equal.ergodic, b.ergodic.coords());
        let out = sreg_asym(&p, &cfg, &z0, &mut OracleStream::new(0)).unwrap();
        assert_eq!(out.certificate.delta, 0.0);
        assert_eq!(out.sfo_calls, 60);
    }

    #[test]
    fn schedule_checks() {
        let p = toy(0.0);
        let z0 = start(1.0, 1.0);
        assert!(matches!(
            reg(&p, 1.0, &z0, 5, Stepsize::Constant(1.0)),
            Err(Error::RecipeViolation(_))
        ));
        assert!(matches!(
            sreg(&p, 1.0, &z0, 5, Stepsize::Constant(0.5), &mut OracleStream::new(0)),
            Err(Error::RecipeViolation(_))
        ));
        assert!(matches!(
            reg(&p, 2.0, &z0, 5, Stepsize::Constant(0.1)),
            Err(Error::RecipeViolation(_))
        ));
        let bad = AsymConfig {
            mu_x: 0.5,
            mu_y: 1.0,
            eta_bar: 0.1,
            steps: 10,
            mu_x_upper: 0.5,
            mu_x_lower: 0.5,
            lipschitz: 2.0,
            dual_diameter: 1.0,
        };
        assert!(matches!(
            sreg_asym(&p, &bad, &z0, &mut OracleStream::new(0)),
            Err(Error::RecipeViolation(_))
        ));
    }

    #[test]
    fn ergodic_weights_normalize() {
        // feed the kernel a problem whose operator is zero so ẑ_t = z_t = z0,
        // and check the average of constants is that constant
        let p = Toy {
            mp: 0.0,
            md: 1.0,
            sigma: 0.0,
            set: FeasibleSet::origin_ball(1, 10.0).unwrap(),
        };
        let traj = run(&p, &[0.0, 0.0], 500, |t| 0.5 / (1.0 + t as f64), 0.3, 0.3, 0.3, None);
        assert_eq!(traj.ergodic, vec![0.0, 0.0]);
        // and the explicit weights η_tΛ_t / Σ η_sΛ_s sum to one
        let mu = 0.3;
        let mut lam = 1.0f64;
        let mut w = Vec::new();
        for t in 0..500 {
            let eta = 0.5 / (1.0 + t as f64);
            w.push(eta * lam);
            lam *= 1.0 + mu * eta;
        }
        let total: f64 = w.iter().sum();
        assert!((total - (lam - 1.0) / mu).abs() < 1e-12 * total);
        assert!((traj.ln_lambda - lam.ln()).abs() < 1e-10);
    }

    #[test]
    fn noisy_runs_reproduce() {
        let p = toy(0.7);
        let sched = Stepsize::sreg_default(1.0, p.lipschitz());
        let z0 = start(1.0, 2.0);
        let a = sreg(&p, 1.0, &z0, 100, sched, &mut OracleStream::new(3)).unwrap();
        let b = sreg(&p, 1.0, &z0, 100, sched, &mut OracleStream::new(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.certificate.delta > 0.0);
    }
}
