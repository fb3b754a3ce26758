//! Stochastic Bayesian games: the game abstraction, histories, type
//! distributions and the episode loop every domain and agent plugs into.

mod episode;
mod history;
mod path;
mod types;

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::dist;
use crate::rng::StreamRng;
use crate::scalar::Real;

pub use episode::{run_episode, Controller, EpisodePath, StepContext, StepRecord, TypedPlayer};
pub use history::History;
pub use path::{path_probability, StrategyProfile};
pub use types::{DistClass, PlayerTypeRule, TypeDistribution, TypeSchedule};

/// Actions are indices into each player's finite action set.
pub type JointAction = Vec<usize>;
/// Types are indices into each player's (true) type space.
pub type JointType = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SbgError {
    #[error("player {player} returned a non-normalised action distribution at t={t}")]
    NotNormalized { player: usize, t: usize },
    #[error("distribution has {got} entries but player {player} has {expected} actions")]
    WrongArity { player: usize, expected: usize, got: usize },
    #[error("path visits terminal state at interior index {index}")]
    TerminalPrefix { index: usize },
    #[error("path is malformed: {0}")]
    MalformedPath(String),
    #[error("controller count {got} does not match player count {expected}")]
    ControllerCount { expected: usize, got: usize },
}

/// A stochastic Bayesian game with observable states and actions.
///
/// Payoffs do not depend on the players' types in any domain shipped here,
/// so the type tag of the payoff function is omitted.
pub trait GameModel<F: Real>: Send + Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;

    fn domain_id(&self) -> &str;
    fn num_players(&self) -> usize;
    fn num_actions(&self, player: usize) -> usize;
    fn initial_state(&self) -> Self::State;
    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Per-player payoffs for executing `joint` in `state`.
    fn payoffs(&self, state: &Self::State, joint: &[usize]) -> Vec<F>;

    /// Successor distribution. Probabilities of duplicate states are merged.
    fn transitions(&self, state: &Self::State, joint: &[usize]) -> Vec<(Self::State, F)>;

    fn sample_transition(
        &self,
        state: &Self::State,
        joint: &[usize],
        rng: &mut StreamRng,
    ) -> Self::State {
        let mut succ = self.transitions(state, joint);
        if succ.len() == 1 {
            return succ.pop().unwrap().0;
        }
        let probs: Vec<F> = succ.iter().map(|(_, p)| *p).collect();
        let i = dist::sample_index(&probs, rng);
        succ.swap_remove(i).0
    }

    /// Canonical string key for logs and serialisation.
    fn state_key(&self, state: &Self::State) -> String;

    fn action_label(&self, _player: usize, action: usize) -> String {
        action.to_string()
    }

    /// Number of joint actions, used to index joint-action tables.
    fn joint_action_count(&self) -> usize {
        (0..self.num_players()).map(|p| self.num_actions(p)).product()
    }

    /// Row-major index of a joint action (player 0 most significant).
    fn joint_index(&self, joint: &[usize]) -> usize {
        let mut idx = 0;
        for (p, &a) in joint.iter().enumerate() {
            idx = idx * self.num_actions(p) + a;
        }
        idx
    }

    fn joint_from_index(&self, mut idx: usize) -> JointAction {
        let n = self.num_players();
        let mut joint = vec![0; n];
        for p in (0..n).rev() {
            let k = self.num_actions(p);
            joint[p] = idx % k;
            idx /= k;
        }
        joint
    }
}

/// Checks the structural invariants of a game at one state: non-empty action
/// sets, and normalised transitions for every joint action.
pub fn check_state_invariants<F: Real, G: GameModel<F>>(game: &G, state: &G::State) -> bool {
    if (0..game.num_players()).any(|p| game.num_actions(p) == 0) {
        return false;
    }
    (0..game.joint_action_count()).all(|j| {
        let joint = game.joint_from_index(j);
        let probs: Vec<F> = game.transitions(state, &joint).into_iter().map(|(_, p)| p).collect();
        dist::is_distribution(&probs)
    })
}
