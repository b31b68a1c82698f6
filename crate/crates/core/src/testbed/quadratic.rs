use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{dmatrix, dvector, from_f64, row_major, to_f64, SPECTRUM_FLOOR};
use crate::catalyst_min::{ExactProx, MinReference};
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{audit_smooth, SmoothObjective};
use crate::set::FeasibleSet;
use crate::Scalar;

/// `f(x) = ½xᵀAx − bᵀx` on `Ball(0, R)` with `A = Q diag(λ) Qᵀ`,
/// `x* = A⁻¹b` and `R = 2‖x*‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticInstance<S> {
    dim: usize,
    /// Row-major `A`.
    a: Vec<S>,
    b: Vec<S>,
    x_star: Vec<S>,
    f_star: S,
    /// Spectrum of `A`, ascending.
    eigenvalues: Vec<S>,
    /// Row-major orthogonal factor; column `i` is the eigenvector of `λ_i`.
    q: Vec<S>,
    lipschitz: S,
    mu: S,
    sigma: S,
    radius: S,
    set: FeasibleSet<S>,
}

/// Random quadratic with spectrum endpoints `max(μ, 10⁻⁶)` and `L`, the
/// interior eigenvalues log-uniform between them. Deterministic in `seed`.
pub fn gen_quadratic<S: Scalar>(dim: usize, lipschitz: S, mu: S, seed: u64) -> Result<QuadraticInstance<S>> {
    if dim == 0 {
        return Err(Error::param("d", "must be at least 1"));
    }
    let (l, m) = (lipschitz.as_f64(), mu.as_f64());
    if !(m >= 0.0) || !(l > 0.0) || m > l {
        return Err(Error::param("mu", format!("need 0 <= mu <= L, got mu={m}, L={l}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low = m.max(SPECTRUM_FLOOR).min(l);
    let mut lambda = vec![l; dim];
    if dim > 1 {
        lambda[0] = low;
        for v in lambda.iter_mut().take(dim - 1).skip(1) {
            let u: f64 = rng.random();
            *v = (low.ln() + u * (l.ln() - low.ln())).exp();
        }
        lambda.sort_by(f64::total_cmp);
    }
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let a = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda.clone())) * q.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let x_star: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let b = &a * nalgebra::DVector::from_vec(x_star.clone());
    QuadraticInstance::assemble(
        dim,
        row_major(&a),
        b.as_slice().to_vec(),
        x_star,
        lambda,
        row_major(&q),
        lipschitz,
        mu,
    )
}

impl<S: Scalar> QuadraticInstance<S> {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        dim: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        x_star: Vec<f64>,
        eigenvalues: Vec<f64>,
        q: Vec<f64>,
        lipschitz: S,
        mu: S,
    ) -> Result<Self> {
        let norm = linalg::norm(&x_star);
        let radius = if norm > 0.0 { 2.0 * norm } else { 1.0 };
        let f_star = -0.5 * linalg::dot(&b, &x_star);
        Ok(Self {
            dim,
            a: from_f64(&a),
            b: from_f64(&b),
            x_star: from_f64(&x_star),
            f_star: S::of(f_star),
            eigenvalues: from_f64(&eigenvalues),
            q: from_f64(&q),
            lipschitz,
            mu,
            sigma: S::zero(),
            radius: S::of(radius),
            set: FeasibleSet::origin_ball(dim, S::of(radius))?,
        })
    }

    /// Instance from an explicit symmetric positive definite `A` (row-major)
    /// and `b`; the spectrum is computed.
    pub fn from_parts(a: Vec<S>, b: Vec<S>, lipschitz: S, mu: S) -> Result<Self> {
        let dim = b.len();
        Error::check_dim("quadratic matrix", dim * dim, a.len())?;
        let am = dmatrix(&a, dim, dim);
        let chol = am
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InstanceConstruction("A is not positive definite".into()))?;
        let x_star = chol.solve(&dvector(&b));
        let eig = SymmetricEigen::new(am);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let lambda: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let q = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
        Self::assemble(
            dim,
            to_f64(&a),
            to_f64(&b),
            x_star.as_slice().to_vec(),
            lambda,
            row_major(&q),
            lipschitz,
            mu,
        )
    }

    /// Rebuilds an instance from stored fields without recomputation.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_stored(
        dim: usize,
        lipschitz: S,
        mu: S,
        sigma: S,
        radius: S,
        f_star: S,
        a: Vec<S>,
        b: Vec<S>,
        x_star: Vec<S>,
        eigenvalues: Vec<S>,
        q: Vec<S>,
    ) -> Result<Self> {
        Ok(Self {
            dim,
            set: FeasibleSet::origin_ball(dim, radius)?,
            a,
            b,
            x_star,
            f_star,
            eigenvalues,
            q,
            lipschitz,
            mu,
            sigma,
            radius,
        })
    }

    /// Same instance with additive Gaussian gradient noise of level `σ`.
    pub fn with_noise(mut self, sigma: S) -> Result<Self> {
        if !(sigma >= S::zero()) {
            return Err(Error::param("sigma", "must be non-negative"));
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn matrix(&self) -> &[S] {
        &self.a
    }

    pub fn linear_term(&self) -> &[S] {
        &self.b
    }

    pub fn eigenvalues(&self) -> &[S] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[S] {
        &self.q
    }

    pub fn radius(&self) -> S {
        self.radius
    }

    /// Suggested start `x₀ = −x*`, at distance `2‖x*‖` from the solution.
    pub fn default_start(&self) -> Vec<S> {
        self.x_star.iter().map(|&v| -v).collect()
    }

    /// Checks the spectrum against a fresh eigen-solve, stationarity at
    /// `x*`, interiority, and the sampled smoothness audit.
    pub fn audit(&self) -> Result<()> {
        let eig = SymmetricEigen::new(dmatrix(&self.a, self.dim, self.dim));
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        let l = self.lipschitz.as_f64();
        let floor = self.mu.as_f64().max(SPECTRUM_FLOOR).min(l);
        if (hi - l).abs() > 1e-6 * l.max(1.0) {
            return Err(Error::InstanceConstruction(format!(
                "lambda_max {hi} differs from L {l}"
            )));
        }
        let lo_ok = if self.dim > 1 {
            (lo - floor).abs() <= 1e-6
        } else {
            lo >= floor - 1e-6
        };
        if !lo_ok {
            return Err(Error::InstanceConstruction(format!(
                "lambda_min {lo} differs from {floor}"
            )));
        }
        let g = to_f64(&self.gradient(&self.x_star));
        let scale = 1.0 + linalg::norm(&to_f64(&self.b));
        if linalg::norm(&g) > 1e-8 * scale {
            return Err(Error::InstanceConstruction("gradient at x* is not zero".into()));
        }
        if (self.value(&self.x_star) - self.f_star).as_f64().abs() > 1e-8 * (1.0 + self.f_star.as_f64().abs()) {
            return Err(Error::InstanceConstruction("f(x*) differs from f*".into()));
        }
        if !(linalg::norm(&self.x_star) < self.radius) {
            return Err(Error::InstanceConstruction("x* is not interior".into()));
        }
        audit_smooth(self, 64, 0x51ab)
    }
}

impl<S: Scalar> SmoothObjective<S> for QuadraticInstance<S> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[S]) -> S {
        let mut ax = vec![S::zero(); self.dim];
        linalg::matvec(&self.a, self.dim, self.dim, x, &mut ax);
        linalg::dot(x, &ax) / S::of(2.0) - linalg::dot(&self.b, x)
    }

    fn gradient_into(&self, x: &[S], out: &mut [S]) {
        linalg::matvec(&self.a, self.dim, self.dim, x, out);
        for (o, &b) in out.iter_mut().zip(&self.b) {
            *o -= b;
        }
    }

    fn smoothness(&self) -> S {
        self.lipschitz
    }

    fn strong_convexity(&self) -> S {
        self.mu
    }

    fn feasible_set(&self) -> &FeasibleSet<S> {
        &self.set
    }

    fn noise(&self) -> S {
        self.sigma
    }
}

impl<S: Scalar> MinReference<S> for QuadraticInstance<S> {
    fn optimal_value(&self) -> S {
        self.f_star
    }

    fn minimizer(&self) -> &[S] {
        &self.x_star
    }
}

impl<S: Scalar> ExactProx<S> for QuadraticInstance<S> {
    /// `(A + βI)⁻¹(βc + b)`, projected onto the ball if it lands outside.
    fn exact_prox(&self, center: &[S], beta: S) -> Result<Vec<S>> {
        Error::check_dim("exact prox center", self.dim, center.len())?;
        if !(beta > S::zero()) {
            return Err(Error::param("beta", "must be positive"));
        }
        let beta64 = beta.as_f64();
        let m = dmatrix(&self.a, self.dim, self.dim) + DMatrix::identity(self.dim, self.dim) * beta64;
        let rhs = dvector(center) * beta64 + dvector(&self.b);
        let chol = m.cholesky().ok_or(Error::NonFinite("exact prox factorization"))?;
        let sol = chol.solve(&rhs);
        let mut out = from_f64::<S>(sol.as_slice());
        self.set.project_in_place(&mut out);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_closed_form() {
        let q = gen_quadratic::<f64>(1, 2.0, 2.0, 3).unwrap();
        assert!((q.matrix()[0] - 2.0).abs() < 1e-12);
        let x = q.minimizer()[0];
        // f(x) = x² − bx, so f(x* + h) − f* = h²
        let h = 0.3;
        assert!((q.value(&[x + h]) - q.optimal_value() - h * h).abs() < 1e-12);
    }

    #[test]
    fn exact_prox_hand_value() {
        let q = QuadraticInstance::<f64>::from_parts(vec![2.0], vec![0.0], 2.0, 2.0).unwrap();
        let p = q.exact_prox(&[1.0], 2.0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_prox_large_beta_returns_center() {
        let q = gen_quadratic(4, 10.0, 1.0, 1).unwrap();
        let c = q.default_start();
        let mut small = c.clone();
        small.iter_mut().for_each(|v| *v *= 0.5);
        let p = q.exact_prox(&small, 1e9).unwrap();
        assert!(linalg::dist(&p, &small) < 1e-6);
    }

    #[test]
    fn spectrum_endpoints_match_eigen_solve() {
        for (d, l, mu) in [(5, 100.0, 1.0), (12, 10.0, 0.0), (2, 3.0, 3.0)] {
            let q = gen_quadratic::<f64>(d, l, mu, 9).unwrap();
            q.audit().unwrap();
            let eig = SymmetricEigen::new(dmatrix(q.matrix(), d, d)).eigenvalues;
            assert!((eig.max() - l).abs() < 1e-6);
            assert!((eig.min() - f64::max(mu, SPECTRUM_FLOOR)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_mu_is_reported_as_zero() {
        let q = gen_quadratic(6, 5.0, 0.0, 2).unwrap();
        assert_eq!(q.strong_convexity(), 0.0);
        assert!(linalg::norm(&q.gradient(q.minimizer())) < 1e-8);
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = gen_quadratic::<f64>(7, 50.0, 0.5, 11).unwrap();
        let b = gen_quadratic::<f64>(7, 50.0, 0.5, 11).unwrap();
        let c = gen_quadratic::<f64>(7, 50.0, 0.5, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            gen_quadratic(3, 1.0, 2.0, 0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            gen_quadratic(0, 1.0, 0.5, 0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn single_precision_instance() {
        let q = gen_quadratic::<f32>(4, 10.0, 1.0, 5).unwrap();
        assert!(linalg::norm(&q.gradient(q.minimizer())) < 1e-4);
    }
}
