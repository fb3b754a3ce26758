//! Harsanyi-Bellman Ad Hoc Coordination: stochastic Bayesian games, type
//! posteriors, planners and the evaluation harness.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod behavior;
pub mod dist;
pub mod eval;
pub mod foraging;
pub mod matrix;
pub mod matrix_agent;
pub mod planner;
pub mod posterior;
pub mod record;
pub mod rl;
pub mod rng;
pub mod sbg;
pub mod scalar;

pub use scalar::Real;

/// Double-precision instantiations.
pub type Posterior64 = posterior::Posterior<f64>;
pub type ForagingGame64 = foraging::ForagingGame<f64>;
pub type MatrixGame64 = matrix::MatrixGame<f64>;
pub type RepeatedGame64 = matrix::RepeatedGame<f64>;
pub type MatrixAgent64 = matrix_agent::MatrixAgent<f64>;
pub type ForagingAgent64 = rl::RlAgent<foraging::ForagingState, f64>;

/// Single-precision instantiations.
pub type Posterior32 = posterior::Posterior<f32>;
pub type ForagingGame32 = foraging::ForagingGame<f32>;
pub type MatrixGame32 = matrix::MatrixGame<f32>;
pub type RepeatedGame32 = matrix::RepeatedGame<f32>;
pub type MatrixAgent32 = matrix_agent::MatrixAgent<f32>;
pub type ForagingAgent32 = rl::RlAgent<foraging::ForagingState, f32>;
