use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{sample_grad_into, ProxSubproblem, SmoothObjective};
use crate::oracle::OracleStream;
use crate::point::Point;
use crate::prox::prox_into;
use crate::Scalar;

use super::weights::{sgd_lambda, sgd_step_size};
use super::{InexactnessCertificate, SolverOutput};

/// Smallest admissible offset `t₀ = ⌈4L_φ/μ_φ⌉`.
pub fn sgd_offset<S: Scalar>(mu_phi: S, l_phi: S) -> usize {
    (S::of(4.0) * l_phi / mu_phi).ceil().to_usize().unwrap_or(usize::MAX)
}

/// Projected SGD on `φ(u) = f(u) + (β/2)‖u − x̂‖²` started at `u₀ = x̂`.
///
/// Uses `η_t = 2/(μ_φ(t + t₀ + 2))` and returns the `Λ`-weighted average
/// together with the certificate `ε = Λ_T/(1−Λ_T)`, `α = 1 + ε` and the
/// noise term `δ`.
pub fn sgd_prox<S: Scalar, P: SmoothObjective<S> + ?Sized>(
    sub: &ProxSubproblem<'_, S, P>,
    steps: usize,
    offset: usize,
    stream: &mut OracleStream,
) -> Result<SolverOutput<S, Point<S>>> {
    let mu = sub.strong_convexity();
    let l = sub.smoothness();
    if S::of_usize(offset) < S::of(4.0) * l / mu * (S::one() - S::of(1e-12)) {
        return Err(Error::RecipeViolation(format!(
            "sgd offset t0={offset} is below 4*L_phi/mu_phi = {}",
            S::of(4.0) * l / mu
        )));
    }
    if steps < offset || steps == 0 {
        return Err(Error::RecipeViolation(format!(
            "sgd needs T >= t0 and T >= 1, got T={steps}, t0={offset}"
        )));
    }

    let set = sub.feasible_set();
    let sigma = sub.noise();
    let d = sub.dim();
    let mut u = sub.center().to_vec();
    let mut next = vec![S::zero(); d];
    let mut g = vec![S::zero(); d];
    let mut scratch = vec![S::zero(); d];
    let mut avg = vec![S::zero(); d];
    let mut noise_sum = S::zero();

    for t in 1..=steps {
        let eta = sgd_step_size(mu, t, offset);
        sample_grad_into(sub, &u, stream, &mut g, &mut scratch);
        prox_into(set, eta, &u, &g, &[], &mut next);
        std::mem::swap(&mut u, &mut next);

        let lam: S = sgd_lambda(t, offset);
        linalg::blend_into(&mut avg, &u, eta * mu / (S::one() - lam));
        if sigma > S::zero() {
            noise_sum += mu * eta * eta * sigma * sigma / (lam * (S::one() - l * eta));
        }
    }

    let lam_t: S = sgd_lambda(steps, offset);
    let delta = lam_t / (S::of(2.0) * (S::one() - lam_t)) * noise_sum;
    Ok(SolverOutput {
        ergodic: Point::from_vec_unchecked(avg),
        last: Point::from_vec_unchecked(u),
        sfo_calls: steps as u64,
        certificate: InexactnessCertificate::sgd(lam_t, delta, mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::FeasibleSet;

    /// f(u) = u² on [-10, 10], optionally noisy.
    struct Square {
        set: FeasibleSet<f64>,
        sigma: f64,
    }

    impl SmoothObjective<f64> for Square {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            x[0] * x[0]
        }
        fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
            out[0] = 2.0 * x[0];
        }
        fn smoothness(&self) -> f64 {
            2.0
        }
        fn strong_convexity(&self) -> f64 {
            0.0
        }
        fn feasible_set(&self) -> &FeasibleSet<f64> {
            &self.set
        }
        fn noise(&self) -> f64 {
            self.sigma
        }
    }

    fn square(sigma: f64) -> Square {
        Square {
            set: FeasibleSet::origin_ball(1, 10.0).unwrap(),
            sigma,
        }
    }

    #[test]
    fn converges_to_prox_point() {
        // φ(u) = u² + (u − 1)², minimizer β x̂ / (2 + β) = 0.5
        let f = square(0.0);
        let sub = ProxSubproblem::new(&f, 2.0, vec![1.0]).unwrap();
        assert_eq!(sgd_offset(sub.strong_convexity(), sub.smoothness()), 8);
        let out = sgd_prox(&sub, 500, 8, &mut OracleStream::new(0)).unwrap();
        assert!((out.last.coords()[0] - 0.5).abs() < 1e-3);
        assert_eq!(out.sfo_calls, 500);
        assert_eq!(out.certificate.delta, 0.0);
    }

    #[test]
    fn certificate_bounds_hold() {
        let f = square(1.0);
        let sub = ProxSubproblem::new(&f, 2.0, vec![1.0]).unwrap();
        for t in [8usize, 50, 400] {
            let out = sgd_prox(&sub, t, 8, &mut OracleStream::new(1)).unwrap();
            let c = out.certificate;
            assert!(c.epsilon <= 1.0);
            assert!(c.delta <= 32.0 / (sub.strong_convexity() * t as f64));
            assert!((c.epsilon - 90.0 / ((t as f64 + 9.0) * (t as f64 + 10.0) - 90.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_schedules() {
        let f = square(0.0);
        let sub = ProxSubproblem::new(&f, 2.0, vec![1.0]).unwrap();
        assert!(matches!(
            sgd_prox(&sub, 100, 7, &mut OracleStream::new(0)),
            Err(Error::RecipeViolation(_))
        ));
        assert!(matches!(
            sgd_prox(&sub, 7, 8, &mut OracleStream::new(0)),
            Err(Error::RecipeViolation(_))
        ));
    }

    #[test]
    fn seeded_runs_reproduce() {
        let f = square(0.5);
        let sub = ProxSubproblem::new(&f, 2.0, vec![1.0]).unwrap();
        let a = sgd_prox(&sub, 40, 8, &mut OracleStream::new(9)).unwrap();
        let b = sgd_prox(&sub, 40, 8, &mut OracleStream::new(9)).unwrap();
        assert_eq!(a, b);
        let c = sgd_prox(&sub, 40, 8, &mut OracleStream::new(10)).unwrap();
        assert_ne!(a.last, c.last);
    }
}
