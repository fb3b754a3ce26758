//! A two-state, two-action game with a mixed type distribution, and
//! exhaustive path enumeration over it.

use std::sync::Arc;

use hba_core::behavior::{BehaviorType, SharedType};
use hba_core::rng::stream;
use hba_core::sbg::{path_probability, EpisodePath, GameModel, History, PlayerTypeRule, TypeDistribution};

/// States 0 and 1 are live, 2 is terminal (reachable only from 1).
pub struct TwoState;

impl GameModel<f64> for TwoState {
    type State = u8;

    fn domain_id(&self) -> &str {
        "two-state"
    }
    fn num_players(&self) -> usize {
        2
    }
    fn num_actions(&self, _player: usize) -> usize {
        2
    }
    fn initial_state(&self) -> u8 {
        0
    }
    fn is_terminal(&self, s: &u8) -> bool {
        *s == 2
    }
    fn payoffs(&self, s: &u8, joint: &[usize]) -> Vec<f64> {
        let base = f64::from(*s) + (joint[0] ^ joint[1]) as f64;
        vec![base, -base]
    }
    fn transitions(&self, s: &u8, joint: &[usize]) -> Vec<(u8, f64)> {
        let stay = 0.2 + 0.3 * joint[0] as f64 + 0.1 * joint[1] as f64;
        match s {
            0 => vec![(0, stay), (1, 1.0 - stay)],
            _ => vec![(0, 0.25), (1, 0.75 - stay / 2.0), (2, stay / 2.0)],
        }
    }
    fn state_key(&self, s: &u8) -> String {
        s.to_string()
    }
}

/// Repeats its last action with probability `stick`, otherwise `first`.
struct Sticky {
    first: [f64; 2],
    stick: f64,
}

impl BehaviorType<u8, f64> for Sticky {
    fn name(&self) -> String {
        "sticky".into()
    }
    fn policy(&self, h: &History<u8>, t: usize, player: usize) -> Vec<f64> {
        match t.checked_sub(1) {
            None => self.first.to_vec(),
            Some(prev) => {
                let mut p = vec![1.0 - self.stick; 2];
                p[h.played(prev, player)] = self.stick;
                p
            }
        }
    }
}

/// Action 1 with a probability set by the current state.
struct StateDriven;

impl BehaviorType<u8, f64> for StateDriven {
    fn name(&self) -> String {
        "state".into()
    }
    fn policy(&self, h: &History<u8>, t: usize, _player: usize) -> Vec<f64> {
        let q = if *h.state(t) == 0 { 0.35 } else { 0.8 };
        vec![1.0 - q, q]
    }
}

pub fn types() -> (SharedType<u8, f64>, [SharedType<u8, f64>; 2]) {
    (
        Arc::new(StateDriven),
        [
            Arc::new(Sticky {
                first: [0.6, 0.4],
                stick: 0.9,
            }),
            Arc::new(Sticky {
                first: [0.1, 0.9],
                stick: 0.3,
            }),
        ],
    )
}

pub fn delta() -> TypeDistribution<f64> {
    TypeDistribution::new(vec![
        PlayerTypeRule::Fixed { index: 0 },
        PlayerTypeRule::Mixed { weights: vec![0.45, 0.55] },
    ])
}

pub fn strategy(p: usize, ty: usize, h: &History<u8>) -> Vec<f64> {
    let (zero, one) = types();
    let t = h.t();
    if p == 0 {
        zero.policy(h, t, 0)
    } else {
        one[ty].policy(h, t, 1)
    }
}

/// Every path of at most `horizon` steps, cut at terminal states.
pub fn all_paths(horizon: usize) -> Vec<EpisodePath<u8, f64>> {
    let game = TwoState;
    let mut out = Vec::new();
    let mut stack = vec![EpisodePath {
        seed: 0,
        domain: "two-state".into(),
        history: History::new(0u8),
        types: Vec::new(),
        payoffs: Vec::new(),
        terminating: false,
    }];
    while let Some(p) = stack.pop() {
        if p.terminating || p.len() == horizon {
            out.push(p);
            continue;
        }
        let s = *p.history.current();
        for ty in 0..2 {
            for a0 in 0..2 {
                for a1 in 0..2 {
                    for (next, _) in game.transitions(&s, &[a0, a1]) {
                        let mut q = p.clone();
                        q.history.push(vec![a0, a1], next);
                        q.types.push(vec![0, ty]);
                        q.payoffs.push(game.payoffs(&s, &[a0, a1]));
                        q.terminating = game.is_terminal(&next);
                        stack.push(q);
                    }
                }
            }
        }
    }
    out
}

pub fn probability(path: &EpisodePath<u8, f64>) -> f64 {
    let mut sched = delta().instantiate(stream(0, 0));
    path_probability(&TwoState, &mut sched, &strategy, path).unwrap()
}

