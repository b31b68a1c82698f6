use crate::error::{Error, Result};
use crate::objective::SaddleObjective;
use crate::oracle::OracleStream;
use crate::point::PrimalDualPoint;
use crate::Scalar;

use super::extragradient::{sreg, Stepsize};
use super::SolverOutput;

/// Epoch schedule of the restarted SREG.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartPlan {
    /// Offset `t₀ = 4⌈L/μ⌉` shared by every epoch.
    pub offset: usize,
    /// Steps `T_e` of epoch `e = 1, …, E`.
    pub epoch_steps: Vec<usize>,
}

impl RestartPlan {
    pub fn epochs(&self) -> usize {
        self.epoch_steps.len()
    }

    /// Oracle calls of the whole plan, two per step.
    pub fn sfo_calls(&self) -> u64 {
        self.epoch_steps.iter().map(|&t| 2 * t as u64).sum()
    }
}

/// Output of [`sreg_restarted`].
#[derive(Debug, Clone, PartialEq)]
pub struct RestartedSolve<S> {
    /// Last epoch's output, with `sfo_calls` summed over all epochs.
    pub output: SolverOutput<S, PrimalDualPoint<S>>,
    /// Last iterate of every epoch.
    pub epoch_ends: Vec<PrimalDualPoint<S>>,
    pub plan: RestartPlan,
}

/// Plans `E = ⌈log₂(R²/ε)⌉` epochs (at least one) of
/// `T_e = ⌈6t₀ + 768·2^{e+3}σ²/(μ²R²)⌉` steps each, so that every epoch
/// halves the expected squared distance to the solution.
pub fn sreg_restart_plan<S: Scalar>(lipschitz: S, mu: S, sigma: S, epsilon: S, r_sq: S) -> Result<RestartPlan> {
    if !(epsilon > S::zero()) {
        return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
    }
    if !(r_sq > S::zero()) || !r_sq.is_finite() {
        return Err(Error::param("r_sq", format!("must be positive, got {r_sq}")));
    }
    if !(mu > S::zero()) || !(lipschitz >= mu) {
        return Err(Error::param(
            "mu",
            format!("need 0 < mu <= L, got mu={mu}, L={lipschitz}"),
        ));
    }
    if !(sigma >= S::zero()) {
        return Err(Error::param("sigma", "must be nonnegative"));
    }
    let offset = match Stepsize::sreg_default(mu, lipschitz) {
        Stepsize::Decaying { offset, .. } => offset,
        Stepsize::Constant(_) => unreachable!(),
    };
    let epochs = (r_sq / epsilon).log2().ceil().max(S::one()).to_usize().unwrap_or(1);
    let base = S::of(6.0) * S::of_usize(offset);
    let noise = S::of(768.0) * sigma * sigma / (mu * mu * r_sq);
    let epoch_steps = (1..=epochs)
        .map(|e| {
            let t = base + noise * S::of(2.0).powi(e as i32 + 3);
            t.ceil().to_usize().unwrap_or(usize::MAX)
        })
        .collect();
    Ok(RestartPlan { offset, epoch_steps })
}

/// Multi-epoch SREG: each epoch runs the decaying schedule from the previous
/// epoch's last iterate. `r_sq` must overestimate `‖z₀ − z*‖²`.
pub fn sreg_restarted<S: Scalar, P: SaddleObjective<S> + ?Sized>(
    prob: &P,
    mu: S,
    z0: &PrimalDualPoint<S>,
    epsilon: S,
    r_sq: S,
    stream: &mut OracleStream,
) -> Result<RestartedSolve<S>> {
    let plan = sreg_restart_plan(prob.lipschitz(), mu, prob.noise(), epsilon, r_sq)?;
    let schedule = Stepsize::sreg_default(mu, prob.lipschitz());
    let mut start = z0.clone();
    let mut epoch_ends = Vec::with_capacity(plan.epochs());
    let mut sfo = 0;
    let mut last_output = None;
    for &steps in &plan.epoch_steps {
        let out = sreg(prob, mu, &start, steps, schedule, stream)?;
        sfo += out.sfo_calls;
        start = out.last.clone();
        epoch_ends.push(out.last.clone());
        last_output = Some(out);
    }
    let mut output = last_output.expect("plans have at least one epoch");
    output.sfo_calls = sfo;
    Ok(RestartedSolve {
        output,
        epoch_ends,
        plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_count() {
        let plan = sreg_restart_plan(1.0, 1.0, 0.0, 2f64.powi(-10), 1.0).unwrap();
        assert_eq!(plan.epochs(), 10);
        assert!(plan.epoch_steps.iter().all(|&t| t == 24));
        assert_eq!(plan.offset, 4);
        assert_eq!(plan.sfo_calls(), 480);
    }

    #[test]
    fn noisy_epochs_double() {
        let plan = sreg_restart_plan(2.0, 1.0, 1.0, 0.01, 1.0).unwrap();
        // t0 = 8, T_e = 48 + 768·2^{e+3}
        assert_eq!(plan.epoch_steps[0], 48 + 768 * 16);
        assert_eq!(plan.epoch_steps[1], 48 + 768 * 32);
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(sreg_restart_plan(1.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(sreg_restart_plan(1.0, 1.0, 0.0, 1.0, -1.0).is_err());
    }
}
