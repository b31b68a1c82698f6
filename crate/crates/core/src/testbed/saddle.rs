use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{dmatrix, from_f64, inside_ball, row_major, to_f64};
use crate::catalyst_minimax::MinimaxReference;
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{audit_saddle, SaddleObjective};
use crate::oracle::mix_seed;
use crate::point::PrimalDualPoint;
use crate::set::FeasibleSet;
use crate::Scalar;

const ATTEMPTS: u64 = 5;

/// Shape and constants of a generated saddle instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleParams<S> {
    pub dx: usize,
    pub dy: usize,
    /// Target Lipschitz constant of the operator `G`, attained exactly.
    pub lipschitz: S,
    pub mu_p: S,
    pub mu_d: S,
    /// Multiplies the linear terms `c` and `d`, and with them `z*`.
    pub scale: S,
}

impl<S: Scalar> SaddleParams<S> {
    pub fn new(dx: usize, dy: usize, lipschitz: S, mu_p: S, mu_d: S) -> Self {
        Self {
            dx,
            dy,
            lipschitz,
            mu_p,
            mu_d,
            scale: S::one(),
        }
    }
}

/// `F(x, y) = (μ_p/2)‖x‖² + xᵀBy − (μ_d/2)‖y‖² + cᵀx + dᵀy` on two origin
/// balls that contain the saddle point in their interior.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleInstance<S> {
    dx: usize,
    dy: usize,
    /// Row-major `dx × dy` coupling.
    b: Vec<S>,
    c: Vec<S>,
    d: Vec<S>,
    x_star: Vec<S>,
    y_star: Vec<S>,
    f_star: S,
    lipschitz: S,
    mu_p: S,
    mu_d: S,
    sigma: S,
    radius_x: S,
    radius_y: S,
    set_x: FeasibleSet<S>,
    set_y: FeasibleSet<S>,
}

/// [`gen_saddle_with`] at unit scale.
pub fn gen_saddle<S: Scalar>(
    dx: usize,
    dy: usize,
    lipschitz: S,
    mu_p: S,
    mu_d: S,
    seed: u64,
) -> Result<SaddleInstance<S>> {
    gen_saddle_with(SaddleParams::new(dx, dy, lipschitz, mu_p, mu_d), seed)
}

/// Random instance with `‖B‖₂² = (L − μ_d)(L + μ_p)`, which makes the
/// operator's Lipschitz constant exactly `L`; the remaining singular values of
/// `B` are uniform in `[0.1, 1]·‖B‖₂`. A numerically singular reduced system
/// is retried with a perturbed seed, at most five times.
pub fn gen_saddle_with<S: Scalar>(params: SaddleParams<S>, seed: u64) -> Result<SaddleInstance<S>> {
    let (l, mp, md) = (params.lipschitz.as_f64(), params.mu_p.as_f64(), params.mu_d.as_f64());
    if params.dx == 0 || params.dy == 0 {
        return Err(Error::param("dims", "dx and dy must be at least 1"));
    }
    if !(md > 0.0) || !(mp >= 0.0) || mp > md {
        return Err(Error::param(
            "mu",
            format!("need 0 <= mu_p <= mu_d, mu_d > 0; got {mp}, {md}"),
        ));
    }
    if !(l >= md) {
        return Err(Error::param("L", format!("need L >= max(mu_p, mu_d), got {l}")));
    }
    if !(params.scale > S::zero()) {
        return Err(Error::param("scale", "must be positive"));
    }
    let s_max = ((l - md) * (l + mp)).sqrt();
    let mut last = None;
    for attempt in 0..ATTEMPTS {
        let s = if attempt == 0 { seed } else { mix_seed(seed, attempt) };
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let b = coupling(&mut rng, params.dx, params.dy, s_max);
        let scale = params.scale.as_f64();
        let c: Vec<f64> = (0..params.dx)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d: Vec<f64> = (0..params.dy)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        match SaddleInstance::build(&b, c, d, params.lipschitz, params.mu_p, params.mu_d) {
            Ok(inst) => {
                inst.audit()?;
                return Ok(inst);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(Error::InstanceConstruction(format!(
        "no well-posed instance after {ATTEMPTS} attempts: {}",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal))
        .qr()
        .q()
}

fn coupling(rng: &mut ChaCha8Rng, dx: usize, dy: usize, s_max: f64) -> DMatrix<f64> {
    let u = orthogonal(rng, dx);
    let v = orthogonal(rng, dy);
    let r = dx.min(dy);
    let mut sv = DMatrix::zeros(dx, dy);
    for i in 0..r {
        sv[(i, i)] = if i == 0 {
            s_max
        } else {
            s_max * rng.random_range(0.1..=1.0)
        };
    }
    u * sv * v.transpose()
}

/// Spectral norm of the operator Jacobian `[[μ_p I, B], [−Bᵀ, μ_d I]]`.
fn jacobian_norm(b: &DMatrix<f64>, mp: f64, md: f64) -> f64 {
    let (dx, dy) = b.shape();
    let mut j = DMatrix::zeros(dx + dy, dx + dy);
    j.view_mut((0, 0), (dx, dx)).fill_diagonal(mp);
    j.view_mut((dx, dx), (dy, dy)).fill_diagonal(md);
    j.view_mut((0, dx), (dx, dy)).copy_from(b);
    j.view_mut((dx, 0), (dy, dx)).copy_from(&(-b.transpose()));
    j.singular_values().max()
}

impl<S: Scalar> SaddleInstance<S> {
    /// Solves `(μ_pμ_d I + BBᵀ)x* = −μ_d c − Bd`, `y* = (Bᵀx* + d)/μ_d`,
    /// and sizes the balls: `R_x = 2‖x*‖`, and `R_y` large enough that
    /// `y*(x)` stays interior for every `x` in the primal ball.
    fn build(b: &DMatrix<f64>, c: Vec<f64>, d: Vec<f64>, lipschitz: S, mu_p: S, mu_d: S) -> Result<Self> {
        let (dx, dy) = b.shape();
        let (mp, md) = (mu_p.as_f64(), mu_d.as_f64());
        let m = DMatrix::identity(dx, dx) * (mp * md) + b * b.transpose();
        let eig = SymmetricEigen::new(m.clone()).eigenvalues;
        if !(eig.min() > 1e-10 * eig.max().max(1.0)) {
            return Err(Error::InstanceConstruction(format!(
                "reduced primal system is singular (smallest eigenvalue {})",
                eig.min()
            )));
        }
        let (cv, dv) = (DVector::from_vec(c.clone()), DVector::from_vec(d.clone()));
        let rhs = -(&cv * md) - b * &dv;
        let x = m
            .cholesky()
            .ok_or_else(|| Error::InstanceConstruction("reduced primal system is not positive definite".into()))?
            .solve(&rhs);
        let y = (b.transpose() * &x + &dv) / md;
        let s_max = b.singular_values().max();
        let nx = x.norm();
        let radius_x = if nx > 0.0 { 2.0 * nx } else { 1.0 };
        let radius_y = (2.0 * y.norm()).max(1.01 * (s_max * radius_x + dv.norm()) / md);
        let inst = Self::from_stored(
            dx,
            dy,
            lipschitz,
            mu_p,
            mu_d,
            S::zero(),
            S::of(radius_x),
            S::of(radius_y),
            from_f64(&row_major(b)),
            from_f64(&c),
            from_f64(&d),
            from_f64(x.as_slice()),
            from_f64(y.as_slice()),
            None,
        )?;
        Ok(inst)
    }

    /// Instance from an explicit row-major `dx × dy` coupling and linear
    /// terms; `lipschitz` must bound the operator's Lipschitz constant.
    pub fn from_parts(b: Vec<S>, c: Vec<S>, d: Vec<S>, lipschitz: S, mu_p: S, mu_d: S) -> Result<Self> {
        let (dx, dy) = (c.len(), d.len());
        Error::check_dim("saddle coupling", dx * dy, b.len())?;
        if !(mu_d > S::zero()) || !(mu_p >= S::zero()) || mu_p > mu_d {
            return Err(Error::param("mu", "need 0 <= mu_p <= mu_d and mu_d > 0"));
        }
        let inst = Self::build(&dmatrix(&b, dx, dy), to_f64(&c), to_f64(&d), lipschitz, mu_p, mu_d)?;
        inst.audit()?;
        Ok(inst)
    }

    /// Rebuilds an instance from stored fields; `f*` is recomputed when absent.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_stored(
        dx: usize,
        dy: usize,
        lipschitz: S,
        mu_p: S,
        mu_d: S,
        sigma: S,
        radius_x: S,
        radius_y: S,
        b: Vec<S>,
        c: Vec<S>,
        d: Vec<S>,
        x_star: Vec<S>,
        y_star: Vec<S>,
        f_star: Option<S>,
    ) -> Result<Self> {
        let mut inst = Self {
            dx,
            dy,
            b,
            c,
            d,
            x_star,
            y_star,
            f_star: S::zero(),
            lipschitz,
            mu_p,
            mu_d,
            sigma,
            radius_x,
            radius_y,
            set_x: FeasibleSet::origin_ball(dx, radius_x)?,
            set_y: FeasibleSet::origin_ball(dy, radius_y)?,
        };
        inst.f_star = match f_star {
            Some(f) => f,
            None => inst.value(&inst.x_star, &inst.y_star),
        };
        Ok(inst)
    }

    /// Same instance with additive Gaussian operator noise of level `σ`.
    pub fn with_noise(mut self, sigma: S) -> Result<Self> {
        if !(sigma >= S::zero()) {
            return Err(Error::param("sigma", "must be non-negative"));
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn coupling(&self) -> &[S] {
        &self.b
    }

    pub fn primal_linear(&self) -> &[S] {
        &self.c
    }

    pub fn dual_linear(&self) -> &[S] {
        &self.d
    }

    pub fn radii(&self) -> (S, S) {
        (self.radius_x, self.radius_y)
    }

    /// Suggested start `z₀ = −z*`.
    pub fn default_start(&self) -> PrimalDualPoint<S> {
        let neg: Vec<S> = self.x_star.iter().chain(&self.y_star).map(|&v| -v).collect();
        PrimalDualPoint::from_vec_unchecked(neg, self.dx)
    }

    /// Unconstrained maximizer `(Bᵀx + d)/μ_d`.
    fn argmax_raw(&self, x: &[S]) -> Vec<S> {
        let mut y = vec![S::zero(); self.dy];
        linalg::matvec_t(&self.b, self.dx, self.dy, x, &mut y);
        for (v, &dv) in y.iter_mut().zip(&self.d) {
            *v = (*v + dv) / self.mu_d;
        }
        y
    }

    /// `g(y) = min_{x ∈ X} F(x, y)`, with the minimizer the projection of
    /// `−(By + c)/μ_p` (or the boundary point along `−(By + c)` when `μ_p = 0`).
    pub fn dual_value(&self, y: &[S]) -> S {
        let mut g = vec![S::zero(); self.dx];
        linalg::matvec(&self.b, self.dx, self.dy, y, &mut g);
        for (v, &cv) in g.iter_mut().zip(&self.c) {
            *v += cv;
        }
        let x: Vec<S> = if self.mu_p > S::zero() {
            let mut x: Vec<S> = g.iter().map(|&v| -v / self.mu_p).collect();
            self.set_x.project_in_place(&mut x);
            x
        } else {
            let n = linalg::norm(&g);
            if n > S::zero() {
                g.iter().map(|&v| -self.radius_x * v / n).collect()
            } else {
                vec![S::zero(); self.dx]
            }
        };
        self.value(&x, y)
    }

    /// Interiority, `G(z*) = 0`, the Jacobian norm against `L`, strong
    /// duality at `z*`, and the sampled convexity audit.
    pub fn audit(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InstanceConstruction(m));
        let (nx, ny) = (linalg::norm(&self.x_star), linalg::norm(&self.y_star));
        if !(nx < self.radius_x) || !(ny < self.radius_y) {
            return fail("saddle point is not interior".into());
        }
        let z: Vec<S> = self.x_star.iter().chain(&self.y_star).copied().collect();
        let mut g = vec![S::zero(); self.dx + self.dy];
        self.operator_into(&z, &mut g);
        let scale = 1.0 + linalg::norm(&to_f64(&self.c)) + linalg::norm(&to_f64(&self.d));
        if linalg::norm(&to_f64(&g)) > 1e-8 * scale * f64::max(1.0, S::epsilon().as_f64() / f64::EPSILON) {
            return fail("operator does not vanish at z*".into());
        }
        let jn = jacobian_norm(
            &dmatrix(&self.b, self.dx, self.dy),
            self.mu_p.as_f64(),
            self.mu_d.as_f64(),
        );
        let l = self.lipschitz.as_f64();
        if jn > l * (1.0 + f64::max(1e-9, 10.0 * S::epsilon().as_f64())) {
            return fail(format!("operator Lipschitz constant {jn} exceeds L = {l}"));
        }
        let (p, q, f) = (
            self.primal_value(&self.x_star).as_f64(),
            self.dual_value(&self.y_star).as_f64(),
            self.f_star.as_f64(),
        );
        let tol = 1e-8 * (1.0 + f.abs()) * f64::max(1.0, S::epsilon().as_f64() / f64::EPSILON);
        if (p - f).abs() > tol || (q - f).abs() > tol {
            return fail(format!("strong duality fails: f(x*)={p}, g(y*)={q}, F(z*)={f}"));
        }
        audit_saddle(self, 64, 0x5add)
    }

    /// Spectral norm of the operator Jacobian, computed by SVD.
    pub fn jacobian_lipschitz(&self) -> f64 {
        jacobian_norm(
            &dmatrix(&self.b, self.dx, self.dy),
            self.mu_p.as_f64(),
            self.mu_d.as_f64(),
        )
    }
}

impl<S: Scalar> SaddleObjective<S> for SaddleInstance<S> {
    fn dims(&self) -> (usize, usize) {
        (self.dx, self.dy)
    }

    fn value(&self, x: &[S], y: &[S]) -> S {
        let mut by = vec![S::zero(); self.dx];
        linalg::matvec(&self.b, self.dx, self.dy, y, &mut by);
        let two = S::of(2.0);
        self.mu_p * linalg::norm_sq(x) / two + linalg::dot(x, &by) - self.mu_d * linalg::norm_sq(y) / two
            + linalg::dot(&self.c, x)
            + linalg::dot(&self.d, y)
    }

    fn grad_x_into(&self, x: &[S], y: &[S], out: &mut [S]) {
        linalg::matvec(&self.b, self.dx, self.dy, y, out);
        for i in 0..self.dx {
            out[i] += self.mu_p * x[i] + self.c[i];
        }
    }

    fn grad_y_into(&self, x: &[S], y: &[S], out: &mut [S]) {
        linalg::matvec_t(&self.b, self.dx, self.dy, x, out);
        for i in 0..self.dy {
            out[i] += self.d[i] - self.mu_d * y[i];
        }
    }

    fn lipschitz(&self) -> S {
        self.lipschitz
    }

    fn primal_modulus(&self) -> S {
        self.mu_p
    }

    fn dual_modulus(&self) -> S {
        self.mu_d
    }

    fn primal_set(&self) -> &FeasibleSet<S> {
        &self.set_x
    }

    fn dual_set(&self) -> &FeasibleSet<S> {
        &self.set_y
    }

    fn noise(&self) -> S {
        self.sigma
    }

    fn dual_diameter(&self) -> Option<S> {
        Some(S::of(2.0) * self.radius_y)
    }
}

impl<S: Scalar> MinimaxReference<S> for SaddleInstance<S> {
    fn optimal_value(&self) -> S {
        self.f_star
    }

    /// `F(x, y*(x))` with the closed-form maximizer.
    fn primal_value(&self, x: &[S]) -> S {
        let y = self.argmax_raw(x);
        self.value(x, &y)
    }

    /// `y*(x) = (Bᵀx + d)/μ_d`; adding a primal prox term leaves it unchanged.
    fn inner_argmax(&self, x: &[S]) -> Result<Vec<S>> {
        let y = self.argmax_raw(x);
        if !inside_ball(linalg::norm(&y).as_f64(), self.radius_y.as_f64()) {
            return Err(Error::InstanceConstruction(format!(
                "inner maximizer leaves the dual ball (norm {} > {})",
                linalg::norm(&y),
                self.radius_y
            )));
        }
        Ok(y)
    }

    fn saddle_point(&self) -> (&[S], &[S]) {
        (&self.x_star, &self.y_star)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_instance_has_origin_saddle() {
        let s = SaddleInstance::from_parts(vec![1.0], vec![0.0], vec![0.0], 2f64.sqrt(), 1.0, 1.0).unwrap();
        assert_eq!(s.saddle_point(), (&[0.0][..], &[0.0][..]));
    }

    #[test]
    fn bilinear_closed_forms() {
        // F = xy − y²/2: y*(x) = x, f(x) = x²/2
        let s = SaddleInstance::<f64>::from_parts(vec![1.0], vec![0.0], vec![0.0], 2.0, 0.0, 1.0).unwrap();
        for x in [-0.9, -0.2, 0.0, 0.4, 1.0] {
            assert_eq!(s.inner_argmax(&[x]).unwrap(), vec![x]);
            assert!((s.primal_value(&[x]) - x * x / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn primal_value_matches_ternary_search() {
        for seed in 0..4 {
            let s = gen_saddle::<f64>(1, 1, 5.0, 0.5, 1.0, seed).unwrap();
            let r = s.radii().1;
            for x in [-0.5 * s.radii().0, 0.0, 0.3 * s.radii().0] {
                let (mut lo, mut hi) = (-r, r);
                for _ in 0..10_000 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if s.value(&[x], &[m1]) < s.value(&[x], &[m2]) {
                        lo = m1;
                    } else {
                        hi = m2;
                    }
                    if hi - lo < 1e-14 {
                        break;
                    }
                }
                let grid = s.value(&[x], &[(lo + hi) / 2.0]);
                assert!((grid - s.primal_value(&[x])).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn primal_is_stationary_at_saddle() {
        let s = gen_saddle::<f64>(4, 6, 20.0, 0.0, 1.0, 3).unwrap();
        let x = s.saddle_point().0.to_vec();
        let h = 1e-5;
        for i in 0..4 {
            let mut p = x.clone();
            let mut m = x.clone();
            p[i] += h;
            m[i] -= h;
            let g = (s.primal_value(&p) - s.primal_value(&m)) / (2.0 * h);
            assert!(g.abs() < 1e-6, "{g}");
        }
    }

    #[test]
    fn lipschitz_is_exact_and_dominates_samples() {
        let s = gen_saddle::<f64>(5, 3, 10.0, 0.5, 2.0, 7).unwrap();
        assert!((s.jacobian_lipschitz() - 10.0).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 8;
        let (mut ga, mut gb) = (vec![0.0; n], vec![0.0; n]);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            s.operator_into(&a, &mut ga);
            s.operator_into(&b, &mut gb);
            assert!(linalg::dist(&ga, &gb) <= s.jacobian_lipschitz() * linalg::dist(&a, &b) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn generated_instances_pass_audit_and_duality() {
        for (dx, dy, mp) in [(2, 2, 0.0), (10, 10, 0.1), (3, 7, 1.0), (6, 2, 0.5)] {
            let s = gen_saddle::<f64>(dx, dy, 10.0, mp, 1.0, 42).unwrap();
            s.audit().unwrap();
            let f = s.optimal_value();
            assert!((s.primal_value(s.saddle_point().0) - f).abs() < 1e-8);
            assert!((s.dual_value(s.saddle_point().1) - f).abs() < 1e-8);
        }
    }

    #[test]
    fn rank_deficient_coupling_fails_after_retries() {
        let err = gen_saddle::<f64>(5, 2, 10.0, 0.0, 1.0, 0).unwrap_err();
        assert!(matches!(err, Error::InstanceConstruction(_)));
    }

    #[test]
    fn inner_argmax_stays_interior_on_primal_ball() {
        let s = gen_saddle::<f64>(3, 3, 8.0, 0.0, 1.0, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let x = crate::objective::random_point(s.primal_set(), &mut rng);
            s.inner_argmax(&x).unwrap();
        }
        let far = vec![100.0 * s.radii().0; 3];
        assert!(s.inner_argmax(&far).is_err());
    }

    #[test]
    fn seeds_and_scale() {
        let a = gen_saddle::<f64>(3, 4, 5.0, 0.2, 1.0, 8).unwrap();
        assert_eq!(a, gen_saddle::<f64>(3, 4, 5.0, 0.2, 1.0, 8).unwrap());
        let mut p = SaddleParams::new(3, 4, 5.0, 0.2, 1.0);
        p.scale = 10.0;
        let b = gen_saddle_with(p, 8).unwrap();
        for (u, v) in a.saddle_point().0.iter().zip(b.saddle_point().0) {
            assert!((10.0 * u - v).abs() < 1e-9 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(gen_saddle::<f64>(2, 2, 10.0, 2.0, 1.0, 0).is_err());
        assert!(gen_saddle::<f64>(2, 2, 0.5, 0.0, 1.0, 0).is_err());
        assert!(gen_saddle::<f64>(2, 2, 10.0, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn single_precision_instance() {
        let s = gen_saddle::<f32>(3, 3, 10.0, 0.5, 1.0, 1).unwrap();
        let y = s.inner_argmax(s.saddle_point().0).unwrap();
        assert!(linalg::dist(&y, s.saddle_point().1) < 1e-4);
    }
}
