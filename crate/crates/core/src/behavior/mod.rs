//! Behaviour types: programs mapping a history to an action distribution.
//!
//! The same objects serve as true types (wrapped in [`BehaviorController`])
//! and as hypotheses in an agent's user-defined type space.

mod conceptual;
mod heuristic;
mod manifest;
mod pd;
mod rps;

use std::sync::Arc;

use crate::dist;
use crate::rng::StreamRng;
use crate::sbg::{Controller, GameModel, History, StepContext};
use crate::scalar::Real;

pub use conceptual::{ConceptualType, ForagingDistance, StateDistance};
pub use heuristic::{Heuristic, HeuristicType};
pub use manifest::{build_foraging_space, build_matrix_space, TypeSpace, TypeSpec};
pub use rps::{focused_policy, RpsBehavior};
pub use pd::PdType;
pub use rps::RpsType;

/// A strategy `pi_j(H^t, ., theta_j)` that depends on the history alone.
pub trait BehaviorType<S, F: Real>: Send + Sync {
    fn name(&self) -> String;

    /// Action distribution of `player` at time `t`, computed from the prefix
    /// `H^t` of `history` (states `0..=t`, joint actions `0..t`).
    fn policy(&self, history: &History<S>, t: usize, player: usize) -> Vec<F>;

    /// Compact statistic of `H^t` that determines this type's behaviour at
    /// `t` and at every later time, given the later joint actions. Planners
    /// memoise on it; `None` disables memoisation.
    fn summary(&self, _history: &History<S>, _t: usize, _player: usize) -> Option<u128> {
        None
    }
}

pub type SharedType<S, F> = Arc<dyn BehaviorType<S, F>>;

/// Uniform over a fixed number of actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformType {
    pub actions: usize,
}

impl<S, F: Real> BehaviorType<S, F> for UniformType {
    fn name(&self) -> String {
        "Uniform".into()
    }

    fn policy(&self, _history: &History<S>, _t: usize, _player: usize) -> Vec<F> {
        dist::uniform(self.actions)
    }

    fn summary(&self, _history: &History<S>, _t: usize, _player: usize) -> Option<u128> {
        Some(0)
    }
}

/// Posterior-weighted average of the types' policies.
pub fn mixture<S, F: Real>(
    types: &[SharedType<S, F>],
    weights: &[F],
    history: &History<S>,
    t: usize,
    player: usize,
) -> Vec<F> {
    let mut out: Vec<F> = Vec::new();
    for (ty, &w) in types.iter().zip(weights) {
        if w == F::zero() {
            continue;
        }
        let p = ty.policy(history, t, player);
        if out.is_empty() {
            out = vec![F::zero(); p.len()];
        }
        for (o, v) in out.iter_mut().zip(p) {
            *o = *o + w * v;
        }
    }
    out
}

/// Plays a behaviour type as a controller.
pub struct BehaviorController<S, F: Real> {
    ty: SharedType<S, F>,
}

impl<S, F: Real> BehaviorController<S, F> {
    pub fn new(ty: SharedType<S, F>) -> Self {
        Self { ty }
    }
}

impl<F: Real, G: GameModel<F>> Controller<F, G> for BehaviorController<G::State, F> {
    fn name(&self) -> String {
        self.ty.name()
    }

    fn act(&mut self, ctx: &StepContext<'_, F, G>, _rng: &mut StreamRng) -> Vec<F> {
        self.ty.policy(ctx.history, ctx.t(), ctx.player)
    }
}
