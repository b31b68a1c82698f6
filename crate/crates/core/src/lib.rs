//! Catalyst acceleration for convex minimization and convex-concave minimax
//! problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`set`], [`prox`], [`objective`], [`oracle`]: Euclidean feasible sets,
//!   the anchored prox-mapping, oracle bundles and counter-based noise.
//! * [`subsolvers`]: prox-SGD and the regularized extragradient family.
//! * [`catalyst_min`], [`catalyst_minimax`]: the outer loops and their
//!   parameter recipes.
//! * [`testbed`]: quadratic and bilinear-coupled saddle instances with known
//!   solutions.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the usual double-precision choice.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalyst_min;
pub mod catalyst_minimax;
pub mod error;
pub mod linalg;
pub mod objective;
pub mod oracle;
pub mod point;
pub mod prox;
pub mod scalar;
pub mod set;
pub mod subsolvers;
pub mod testbed;
pub mod trace;

pub use catalyst_min::{
    catalyst_run, catalyst_run_exact, r_catalyst_run, recipe_smooth, recipe_strongly_convex, ExactProx, MinRecipe,
    MinReference, MinRun, RestartedMinRecipe,
};
pub use catalyst_minimax::{
    catalyst_minimax_run, r_catalyst_minimax_run, recipe_det, recipe_stoch, restarted_det, restarted_stoch, Horizon,
    InnerKind, MinimaxRecipe, MinimaxReference, MinimaxRun, RestartedMinimaxRecipe,
};
pub use error::{Error, Result};
pub use objective::{
    saddle_operator, sample_grad, sample_operator, ProxSubproblem, SaddleObjective, SaddleSubproblem, SmoothObjective,
};
pub use oracle::OracleStream;
pub use point::{Point, PrimalDualPoint};
pub use prox::prox_step;
pub use scalar::Scalar;
pub use set::FeasibleSet;
pub use subsolvers::{InexactnessCertificate, SolverOutput};
pub use testbed::{gen_quadratic, gen_saddle, QuadraticInstance, SaddleInstance};
pub use trace::{RunTrace, TraceRow};

pub type Point64 = Point<f64>;
pub type PrimalDualPoint64 = PrimalDualPoint<f64>;
pub type FeasibleSet64 = FeasibleSet<f64>;
pub type Certificate64 = InexactnessCertificate<f64>;
pub type QuadraticInstance64 = testbed::QuadraticInstance<f64>;
pub type SaddleInstance64 = testbed::SaddleInstance<f64>;
pub type MinRecipe64 = catalyst_min::MinRecipe<f64>;
pub type MinimaxRecipe64 = catalyst_minimax::MinimaxRecipe<f64>;

pub type Point32 = Point<f32>;
pub type PrimalDualPoint32 = PrimalDualPoint<f32>;
pub type FeasibleSet32 = FeasibleSet<f32>;
pub type QuadraticInstance32 = testbed::QuadraticInstance<f32>;
pub type SaddleInstance32 = testbed::SaddleInstance<f32>;
