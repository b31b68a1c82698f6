//! Oracle bundles for smooth minimization and convex-concave saddle problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::oracle::OracleStream;
use crate::point::PrimalDualPoint;
use crate::set::FeasibleSet;
use crate::Scalar;

/// `L`-smooth, `μ`-strongly convex `f` over a compact convex set, with an
/// optional noise level `σ` for its stochastic gradient oracle.
pub trait SmoothObjective<S: Scalar> {
    fn dim(&self) -> usize;
    fn value(&self, x: &[S]) -> S;
    fn gradient_into(&self, x: &[S], out: &mut [S]);
    fn smoothness(&self) -> S;
    fn strong_convexity(&self) -> S;
    fn feasible_set(&self) -> &FeasibleSet<S>;

    fn noise(&self) -> S {
        S::zero()
    }

    fn gradient(&self, x: &[S]) -> Vec<S> {
        let mut g = vec![S::zero(); x.len()];
        self.gradient_into(x, &mut g);
        g
    }
}

/// `F(x, y)`, `μ_p`-convex in `x`, `μ_d`-concave in `y`, whose operator
/// `G = (∇ₓF, −∇ᵧF)` is `L`-Lipschitz.
pub trait SaddleObjective<S: Scalar> {
    fn dims(&self) -> (usize, usize);
    fn value(&self, x: &[S], y: &[S]) -> S;
    fn grad_x_into(&self, x: &[S], y: &[S], out: &mut [S]);
    fn grad_y_into(&self, x: &[S], y: &[S], out: &mut [S]);
    fn lipschitz(&self) -> S;
    fn primal_modulus(&self) -> S;
    fn dual_modulus(&self) -> S;
    fn primal_set(&self) -> &FeasibleSet<S>;
    fn dual_set(&self) -> &FeasibleSet<S>;

    fn noise(&self) -> S {
        S::zero()
    }

    /// Diameter bound `D_Y` of the dual set.
    fn dual_diameter(&self) -> Option<S> {
        Some(self.dual_set().diameter())
    }

    /// Writes `G(z)` for the stacked `z = (x, y)`.
    fn operator_into(&self, z: &[S], out: &mut [S]) {
        let dx = self.dims().0;
        let (x, y) = z.split_at(dx);
        let (ox, oy) = out.split_at_mut(dx);
        self.grad_x_into(x, y, ox);
        self.grad_y_into(x, y, oy);
        oy.iter_mut().for_each(|v| *v = -*v);
    }
}

/// The stacked monotone operator `G(z) = [∇ₓF(z); −∇ᵧF(z)]`.
pub fn saddle_operator<S: Scalar, P: SaddleObjective<S> + ?Sized>(prob: &P, z: &PrimalDualPoint<S>) -> Result<Vec<S>> {
    let (dx, dy) = prob.dims();
    Error::check_dim("saddle_operator primal block", dx, z.split())?;
    Error::check_dim("saddle_operator", dx + dy, z.coords().len())?;
    let mut out = vec![S::zero(); dx + dy];
    prob.operator_into(z.coords(), &mut out);
    Ok(out)
}

/// One stochastic gradient: `∇f(x) + n` with `E‖n‖² = σ²`.
pub fn sample_grad<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &P,
    x: &[S],
    stream: &mut OracleStream,
) -> Result<Vec<S>> {
    Error::check_dim("sample_grad", prob.dim(), x.len())?;
    let mut g = vec![S::zero(); x.len()];
    let mut n = vec![S::zero(); x.len()];
    sample_grad_into(prob, x, stream, &mut g, &mut n);
    Ok(g)
}

pub(crate) fn sample_grad_into<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    prob: &P,
    x: &[S],
    stream: &mut OracleStream,
    out: &mut [S],
    scratch: &mut [S],
) {
    prob.gradient_into(x, out);
    add_noise(prob.noise(), stream, out, scratch);
}

/// One stochastic operator evaluation `G(z, ξ)`.
pub fn sample_operator<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    z: &PrimalDualPoint<S>,
    stream: &mut OracleStream,
) -> Result<Vec<S>> {
    let mut g = saddle_operator(prob, z)?;
    let mut n = vec![S::zero(); g.len()];
    add_noise(prob.noise(), stream, &mut g, &mut n);
    Ok(g)
}

pub(crate) fn add_noise<S: Scalar>(sigma: S, stream: &mut OracleStream, out: &mut [S], scratch: &mut [S]) {
    if sigma > S::zero() {
        stream.draw(sigma, scratch);
        linalg::axpy(S::one(), scratch, out);
    } else {
        stream.tick();
    }
}

/// `φ(x) = f(x) + (β/2)‖x − x̂‖²`.
///
/// The moduli default to `(μ + β, L + β)`; recipes may declare other valid
/// bounds through [`ProxSubproblem::with_moduli`].
#[derive(Debug, Clone)]
pub struct ProxSubproblem<'a, S, P: ?Sized> {
    base: &'a P,
    beta: S,
    center: Vec<S>,
    mu: S,
    smooth: S,
}

impl<'a, S: Scalar, P: SmoothObjective<S> + ?Sized> ProxSubproblem<'a, S, P> {
    pub fn new(base: &'a P, beta: S, center: Vec<S>) -> Result<Self> {
        if !(beta > S::zero()) || !beta.is_finite() {
            return Err(Error::param("beta", format!("must be positive, got {beta}")));
        }
        Error::check_dim("ProxSubproblem center", base.dim(), center.len())?;
        if !linalg::all_finite(&center) {
            return Err(Error::NonFinite("ProxSubproblem center"));
        }
        Ok(Self {
            mu: base.strong_convexity() + beta,
            smooth: base.smoothness() + beta,
            base,
            beta,
            center,
        })
    }

    /// Declares `(μ_φ, L_φ)` used by step-size rules.
    pub fn with_moduli(mut self, mu: S, smooth: S) -> Result<Self> {
        if !(mu > S::zero()) || !(smooth >= mu) {
            return Err(Error::param(
                "moduli",
                format!("need 0 < mu <= L, got ({mu}, {smooth})"),
            ));
        }
        self.mu = mu;
        self.smooth = smooth;
        Ok(self)
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn center(&self) -> &[S] {
        &self.center
    }

    pub fn base(&self) -> &P {
        self.base
    }
}

impl<S: Scalar, P: SmoothObjective<S> + ?Sized> SmoothObjective<S> for ProxSubproblem<'_, S, P> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &[S]) -> S {
        self.base.value(x) + self.beta * linalg::dist_sq(x, &self.center) / S::of(2.0)
    }

    fn gradient_into(&self, x: &[S], out: &mut [S]) {
        self.base.gradient_into(x, out);
        for i in 0..out.len() {
            out[i] += self.beta * (x[i] - self.center[i]);
        }
    }

    fn smoothness(&self) -> S {
        self.smooth
    }

    fn strong_convexity(&self) -> S {
        self.mu
    }

    fn feasible_set(&self) -> &FeasibleSet<S> {
        self.base.feasible_set()
    }

    fn noise(&self) -> S {
        self.base.noise()
    }
}

/// `Φ(x, y) = F(x, y) + (β/2)‖x − x̂‖²`.
#[derive(Debug, Clone)]
pub struct SaddleSubproblem<'a, S, P: ?Sized> {
    base: &'a P,
    beta: S,
    center: Vec<S>,
}

impl<'a, S: Scalar, P: SaddleObjective<S> + ?Sized> SaddleSubproblem<'a, S, P> {
    pub fn new(base: &'a P, beta: S, center: Vec<S>) -> Result<Self> {
        if !(beta >= S::zero()) || !beta.is_finite() {
            return Err(Error::param("beta", format!("must be nonnegative, got {beta}")));
        }
        Error::check_dim("SaddleSubproblem center", base.dims().0, center.len())?;
        if !linalg::all_finite(&center) {
            return Err(Error::NonFinite("SaddleSubproblem center"));
        }
        Ok(Self { base, beta, center })
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn center(&self) -> &[S] {
        &self.center
    }
}

impl<S: Scalar, P: SaddleObjective<S> + ?Sized> SaddleObjective<S> for SaddleSubproblem<'_, S, P> {
    fn dims(&self) -> (usize, usize) {
        self.base.dims()
    }

    fn value(&self, x: &[S], y: &[S]) -> S {
        self.base.value(x, y) + self.beta * linalg::dist_sq(x, &self.center) / S::of(2.0)
    }

    fn grad_x_into(&self, x: &[S], y: &[S], out: &mut [S]) {
        self.base.grad_x_into(x, y, out);
        for i in 0..out.len() {
            out[i] += self.beta * (x[i] - self.center[i]);
        }
    }

    fn grad_y_into(&self, x: &[S], y: &[S], out: &mut [S]) {
        self.base.grad_y_into(x, y, out);
    }

    fn lipschitz(&self) -> S {
        self.base.lipschitz() + self.beta
    }

    fn primal_modulus(&self) -> S {
        self.base.primal_modulus() + self.beta
    }

    /// The prox term only touches `x`, so concavity in `y` is unchanged.
    fn dual_modulus(&self) -> S {
        self.base.dual_modulus()
    }

    fn primal_set(&self) -> &FeasibleSet<S> {
        self.base.primal_set()
    }

    fn dual_set(&self) -> &FeasibleSet<S> {
        self.base.dual_set()
    }

    fn noise(&self) -> S {
        self.base.noise()
    }

    fn dual_diameter(&self) -> Option<S> {
        self.base.dual_diameter()
    }
}

/// Random point of `set`: a Gaussian of the set's scale, projected.
pub fn random_point<S: Scalar, R: Rng>(set: &FeasibleSet<S>, rng: &mut R) -> Vec<S> {
    let scale = set.diameter().as_f64().max(1.0);
    let raw: Vec<S> = (0..set.dim())
        .map(|_| {
            let n: f64 = rng.sample(StandardNormal);
            S::of(scale * n)
        })
        .collect();
    let mut p = raw;
    set.project_in_place(&mut p);
    p
}

fn audit_tol<S: Scalar>(scale: S) -> S {
    S::epsilon().sqrt() * S::of(1e-1) * (S::one() + scale.abs())
}

/// Sampled audit of the smoothness and strong-convexity claims.
pub fn audit_smooth<S: Scalar, P: SmoothObjective<S> + ?Sized>(prob: &P, probes: usize, seed: u64) -> Result<()> {
    let (l, mu) = (prob.smoothness(), prob.strong_convexity());
    if !(mu >= S::zero()) || !(l > S::zero()) || mu > l {
        return Err(Error::InstanceConstruction(format!(
            "need 0 <= mu <= L, got mu={mu}, L={l}"
        )));
    }
    if prob.noise() < S::zero() {
        return Err(Error::InstanceConstruction("negative noise level".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = prob.feasible_set();
    for _ in 0..probes {
        let a = random_point(set, &mut rng);
        let b = random_point(set, &mut rng);
        let (ga, gb) = (prob.gradient(&a), prob.gradient(&b));
        let gap = linalg::dist(&ga, &gb);
        let d = linalg::dist(&a, &b);
        if gap > l * d + audit_tol(l * d) {
            return Err(Error::InstanceConstruction(format!(
                "gradient Lipschitz check failed: {gap} > {l} * {d}"
            )));
        }
        let (fa, fb) = (prob.value(&a), prob.value(&b));
        let diff: Vec<S> = b.iter().zip(&a).map(|(&u, &v)| u - v).collect();
        let lower = fa + linalg::dot(&ga, &diff) + mu * d * d / S::of(2.0);
        if fb < lower - audit_tol(fa.abs() + fb.abs()) {
            return Err(Error::InstanceConstruction(format!(
                "strong convexity check failed: f(b)={fb} < {lower}"
            )));
        }
    }
    Ok(())
}

/// Sampled audit of the Lipschitz, convexity and concavity claims of a saddle
/// objective.
pub fn audit_saddle<S: Scalar, P: SaddleObjective<S> + ?Sized>(prob: &P, probes: usize, seed: u64) -> Result<()> {
    let (l, mp, md) = (prob.lipschitz(), prob.primal_modulus(), prob.dual_modulus());
    if !(md > S::zero()) || !(mp >= S::zero()) || mp > md || !(l > S::zero()) {
        return Err(Error::InstanceConstruction(format!(
            "need 0 <= mu_p <= mu_d, mu_d > 0, L > 0; got mu_p={mp}, mu_d={md}, L={l}"
        )));
    }
    let (dx, dy) = prob.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ga = vec![S::zero(); dx + dy];
    let mut gb = vec![S::zero(); dx + dy];
    let two = S::of(2.0);
    for _ in 0..probes {
        let mut a = random_point(prob.primal_set(), &mut rng);
        a.extend(random_point(prob.dual_set(), &mut rng));
        let mut b = random_point(prob.primal_set(), &mut rng);
        b.extend(random_point(prob.dual_set(), &mut rng));
        prob.operator_into(&a, &mut ga);
        prob.operator_into(&b, &mut gb);
        let d = linalg::dist(&a, &b);
        let gap = linalg::dist(&ga, &gb);
        if gap > l * d + audit_tol(l * d) {
            return Err(Error::InstanceConstruction(format!(
                "operator Lipschitz check failed: {gap} > {l} * {d}"
            )));
        }
        let (xa, ya) = a.split_at(dx);
        let (xb, yb) = b.split_at(dx);
        // convexity in x at fixed ya
        let f_a = prob.value(xa, ya);
        let f_b = prob.value(xb, ya);
        let dxv: Vec<S> = xb.iter().zip(xa).map(|(&u, &v)| u - v).collect();
        let lower = f_a + linalg::dot(&ga[..dx], &dxv) + mp * linalg::norm_sq(&dxv) / two;
        if f_b < lower - audit_tol(f_a.abs() + f_b.abs()) {
            return Err(Error::InstanceConstruction("primal convexity check failed".into()));
        }
        // concavity in y at fixed xa; ga holds −∇ᵧF
        let g_b = prob.value(xa, yb);
        let dyv: Vec<S> = yb.iter().zip(ya).map(|(&u, &v)| u - v).collect();
        let upper = f_a - linalg::dot(&ga[dx..], &dyv) - md * linalg::norm_sq(&dyv) / two;
        if g_b > upper + audit_tol(f_a.abs() + g_b.abs()) {
            return Err(Error::InstanceConstruction("dual concavity check failed".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// F(x, y) = (μp/2)x² + xy − (μd/2)y² on [-10, 10]².
    pub(crate) struct Toy {
        pub mp: f64,
        pub md: f64,
        pub set: FeasibleSet<f64>,
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
            // spectral norm of [[mp, 1], [-1, md]]
            let m = nalgebra::Matrix2::new(self.mp, 1.0, -1.0, self.md);
            m.singular_values().max()
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
    }

    fn toy(mp: f64, md: f64) -> Toy {
        Toy {
            mp,
            md,
            set: FeasibleSet::origin_ball(1, 10.0).unwrap(),
        }
    }

    #[test]
    fn bilinear_operator() {
        let p = toy(0.0, 0.0);
        let z = PrimalDualPoint::from_parts(&[1.0], &[2.0]).unwrap();
        assert_eq!(saddle_operator(&p, &z).unwrap(), vec![2.0, -1.0]);
    }

    #[test]
    fn regularized_operator() {
        let p = toy(0.5, 2.0);
        let z = PrimalDualPoint::from_parts(&[3.0], &[-1.0]).unwrap();
        // (μp x + y, μd y − x)
        assert_eq!(saddle_operator(&p, &z).unwrap(), vec![0.5, -5.0]);
        let zero = PrimalDualPoint::from_parts(&[0.0], &[0.0]).unwrap();
        assert_eq!(saddle_operator(&p, &zero).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn toy_passes_audit() {
        audit_saddle(&toy(0.5, 1.0), 200, 1).unwrap();
        assert!(audit_saddle(&toy(2.0, 1.0), 10, 1).is_err());
    }

    #[test]
    fn subproblem_moduli() {
        let p = toy(0.0, 1.0);
        let s = SaddleSubproblem::new(&p, 0.25, vec![1.0]).unwrap();
        assert_eq!(s.primal_modulus(), 0.25);
        assert_eq!(s.dual_modulus(), 1.0);
        let mut g = [0.0];
        s.grad_x_into(&[3.0], &[0.0], &mut g);
        assert_eq!(g[0], 0.25 * 2.0);
        audit_saddle(&s, 100, 2).unwrap();
    }
}
