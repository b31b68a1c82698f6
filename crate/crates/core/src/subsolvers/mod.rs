//! Inner methods that the catalyst schemes accelerate.
//!
//! * [`sgd_prox`]: projected SGD on the prox subproblem with polynomially
//!   decaying weights.
//! * [`reg`], [`sreg`]: (stochastic) regularized extragradient.
//! * [`sreg_restarted`]: multi-epoch SREG reaching a target distance.
//! * [`sreg_asym`]: SREG with separate primal and dual anchors, used inside
//!   the stochastic minimax catalyst.
//!
//! Every solver returns the ergodic average, the last iterate, the number of
//! oracle calls and an [`InexactnessCertificate`].

mod certificate;
mod extragradient;
mod restarted;
mod sgd;
pub mod weights;

pub use certificate::InexactnessCertificate;
pub use extragradient::{reg, sreg, sreg_asym, AsymConfig, Stepsize};
pub use restarted::{sreg_restart_plan, sreg_restarted, RestartPlan, RestartedSolve};
pub use sgd::{sgd_offset, sgd_prox};

/// What a subsolver hands back.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutput<S, P> {
    /// Weighted average of the iterates.
    pub ergodic: P,
    /// Final iterate.
    pub last: P,
    /// Stochastic (or exact) oracle calls spent.
    pub sfo_calls: u64,
    pub certificate: InexactnessCertificate<S>,
}
