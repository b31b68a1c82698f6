use crate::Scalar;

/// Constants `(α, ε, ε′, δ)` certifying an approximate prox solve.
///
/// The guarantee has the form
/// `E[gap + (m·α/2)‖u − last‖²] ≤ (m·ε/2)‖u − start‖² + δ`,
/// with `m = modulus`, so the outer loop uses `α_k = m·α` and `ε_k = m·ε`.
/// When `epsilon_prime` is present it replaces `ε` on the primal block and
/// `ε` applies to the dual block only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InexactnessCertificate<S> {
    pub alpha: S,
    pub epsilon: S,
    pub epsilon_prime: Option<S>,
    pub delta: S,
    pub modulus: S,
}

impl<S: Scalar> InexactnessCertificate<S> {
    /// An exact prox solve with weight `beta`: `α_k = β`, `ε = δ = 0`.
    pub fn exact(beta: S) -> Self {
        Self {
            alpha: S::one(),
            epsilon: S::zero(),
            epsilon_prime: None,
            delta: S::zero(),
            modulus: beta,
        }
    }

    /// Certificate of projected SGD with terminal weight `Λ_T`.
    pub fn sgd(lambda_t: S, delta: S, mu_phi: S) -> Self {
        let denom = S::one() - lambda_t;
        Self {
            alpha: S::one() / denom,
            epsilon: lambda_t / denom,
            epsilon_prime: None,
            delta,
            modulus: mu_phi,
        }
    }

    /// Certificate of (S)REG with `ln Λ_T` and `Λ₀ = 1`.
    pub fn extragradient(ln_lambda_t: S, delta: S, mu: S) -> Self {
        let eps = S::one() / ln_lambda_t.exp_m1();
        Self {
            alpha: S::one() + eps,
            epsilon: eps,
            epsilon_prime: None,
            delta,
            modulus: mu,
        }
    }

    /// Certificate of the asymmetric SREG.
    pub fn asymmetric(ln_lambda_t: S, ln_lambda_bar_t: S, delta: S, mu_x: S) -> Self {
        let eps_prime = S::one() / ln_lambda_t.exp_m1();
        Self {
            alpha: S::one() + eps_prime,
            epsilon: S::of(4.0) / ln_lambda_bar_t.exp_m1(),
            epsilon_prime: Some(eps_prime),
            delta,
            modulus: mu_x,
        }
    }

    /// `α_k` for the outer update.
    pub fn scaled_alpha(&self) -> S {
        self.modulus * self.alpha
    }

    /// `ε_k` (dual block when `ε′` is present).
    pub fn scaled_epsilon(&self) -> S {
        self.modulus * self.epsilon
    }

    /// `ε′_k`, falling back to `ε_k` for symmetric certificates.
    pub fn scaled_epsilon_prime(&self) -> S {
        self.modulus * self.epsilon_prime.unwrap_or(self.epsilon)
    }
}
