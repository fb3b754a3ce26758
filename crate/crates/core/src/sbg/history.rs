use serde::{Deserialize, Serialize};

use super::JointAction;

/// `<s0, a0, s1, a1, ..., st>`: always one more state than joint actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct History<S> {
    states: Vec<S>,
    actions: Vec<JointAction>,
}

impl<S> History<S> {
    pub fn new(initial: S) -> Self {
        Self {
            states: vec![initial],
            actions: Vec::new(),
        }
    }

    /// Current time `t` (number of joint actions taken).
    pub fn t(&self) -> usize {
        self.actions.len()
    }

    pub fn push(&mut self, joint: JointAction, next: S) {
        self.actions.push(joint);
        self.states.push(next);
    }

    /// Rewinds to time `t`, dropping later steps.
    pub fn truncate(&mut self, t: usize) {
        self.actions.truncate(t);
        self.states.truncate(t + 1);
    }

    pub fn current(&self) -> &S {
        self.states.last().expect("history always holds a state")
    }

    pub fn state(&self, tau: usize) -> &S {
        &self.states[tau]
    }

    pub fn action(&self, tau: usize) -> &JointAction {
        &self.actions[tau]
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn actions(&self) -> &[JointAction] {
        &self.actions
    }

    pub fn last_action(&self) -> Option<&JointAction> {
        self.actions.last()
    }

    /// Action of `player` at time `tau`.
    pub fn played(&self, tau: usize, player: usize) -> usize {
        self.actions[tau][player]
    }

    /// Prefix `H^tau`.
    pub fn prefix(&self, tau: usize) -> History<S>
    where
        S: Clone,
    {
        History {
            states: self.states[..=tau].to_vec(),
            actions: self.actions[..tau].to_vec(),
        }
    }
}

impl<S: Clone> History<S> {
    /// Builds a history from parallel state and action lists.
    pub fn from_parts(states: Vec<S>, actions: Vec<JointAction>) -> Option<Self> {
        (states.len() == actions.len() + 1).then_some(Self { states, actions })
    }
}
