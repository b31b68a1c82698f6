//! Closed forms and numerically stable evaluations of the ergodic weights.

use crate::Scalar;

/// SGD step size `η_t = 2/(μ(t + t₀ + 2))` for `t ≥ 1`.
///
/// The offset `+2` makes the product `Π(1 − μη_s)` equal the closed form of
/// [`sgd_lambda`] exactly.
pub fn sgd_step_size<S: Scalar>(mu: S, t: usize, t0: usize) -> S {
    S::of(2.0) / (mu * S::of_usize(t + t0 + 2))
}

/// `Λ_t = (t₀+1)(t₀+2) / ((t+t₀+1)(t+t₀+2))`.
pub fn sgd_lambda<S: Scalar>(t: usize, t0: usize) -> S {
    let num = S::of_usize(t0 + 1) * S::of_usize(t0 + 2);
    num / (S::of_usize(t + t0 + 1) * S::of_usize(t + t0 + 2))
}

/// `(1 + x)^T − 1` without overflow or cancellation.
pub fn growth_minus_one<S: Scalar>(x: S, steps: usize) -> S {
    (S::of_usize(steps) * x.ln_1p()).exp_m1()
}

/// `Γ_k = Π_{j=2..k} (1 − γ_j)` for `γ_j = 2/(j+1)`; equals `2/(k(k+1))`.
pub fn gamma_product<S: Scalar>(k: usize) -> S {
    let mut g = S::one();
    for j in 2..=k {
        g *= S::one() - S::of(2.0) / S::of_usize(j + 1);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_recursion_matches_closed_form() {
        for t0 in [4usize, 8, 17, 400] {
            let mu = 0.7;
            let mut lam = 1.0f64;
            for t in 1..=10_000 {
                lam *= 1.0 - mu * sgd_step_size(mu, t, t0);
                let closed: f64 = sgd_lambda(t, t0);
                assert!(((lam - closed) / closed).abs() < 1e-10, "t0={t0} t={t}");
            }
        }
    }

    #[test]
    fn closed_form_at_t0_8() {
        for t in [1usize, 8, 100, 5000] {
            let expected = 90.0 / ((t as f64 + 9.0) * (t as f64 + 10.0));
            assert!((sgd_lambda::<f64>(t, 8) - expected).abs() < 1e-15);
        }
        assert!((sgd_lambda::<f64>(8, 8) - 5.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn sgd_weights_sum_to_one() {
        for (t_max, t0) in [(8usize, 8usize), (100, 5), (1000, 40), (7, 3)] {
            let mu = 1.3;
            let lt: f64 = sgd_lambda(t_max, t0);
            let s: f64 = (1..=t_max)
                .map(|t| sgd_step_size(mu, t, t0) * mu / sgd_lambda::<f64>(t, t0))
                .sum();
            assert!((lt / (1.0 - lt) * s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_is_stable() {
        assert!((growth_minus_one(0.25f64, 8) - (1.25f64.powi(8) - 1.0)).abs() < 1e-12);
        assert!(growth_minus_one(1e-3f64, 1_000_000).is_infinite());
        let tiny = growth_minus_one(1e-12f64, 3);
        assert!((tiny / 3e-12 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_closed_form() {
        for k in 1..=1000usize {
            let expected = 2.0 / (k as f64 * (k as f64 + 1.0));
            assert!((gamma_product::<f64>(k) - expected).abs() < 1e-12);
        }
    }
}
