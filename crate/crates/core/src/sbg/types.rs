use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist;
use crate::rng::StreamRng;
use crate::scalar::Real;

use super::JointType;

/// How one player's type evolves over an episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PlayerTypeRule<F> {
    /// Static pure: always the same type.
    Fixed { index: usize },
    /// Static mixed: a fresh independent draw at every step.
    Mixed { weights: Vec<F> },
    /// Dynamic pure: a uniformly drawn initial type that changes to a
    /// different candidate after a uniformly drawn number of steps in
    /// `[min_interval, max_interval]`.
    Switching {
        candidates: Vec<usize>,
        min_interval: usize,
        max_interval: usize,
    },
    /// Starts as `base`; with `probability` the player is defective for the
    /// whole episode and then behaves as [`PlayerTypeRule::Switching`].
    Defective {
        base: usize,
        probability: F,
        candidates: Vec<usize>,
        min_interval: usize,
        max_interval: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistClass {
    pub is_static: bool,
    pub is_pure: bool,
}

/// A joint type distribution built from independent per-player rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeDistribution<F> {
    pub players: Vec<PlayerTypeRule<F>>,
}

impl<F: Real> TypeDistribution<F> {
    pub fn new(players: Vec<PlayerTypeRule<F>>) -> Self {
        Self { players }
    }

    /// Static pure distribution fixing every player's type.
    pub fn fixed(joint: &[usize]) -> Self {
        Self::new(
            joint
                .iter()
                .map(|&index| PlayerTypeRule::Fixed { index })
                .collect(),
        )
    }

    pub fn class(&self) -> DistClass {
        let mut c = DistClass {
            is_static: true,
            is_pure: true,
        };
        for rule in &self.players {
            match rule {
                PlayerTypeRule::Fixed { .. } => {}
                PlayerTypeRule::Mixed { weights } => {
                    if weights.iter().filter(|w| **w > F::zero()).count() > 1 {
                        c.is_pure = false;
                    }
                }
                PlayerTypeRule::Switching { candidates, .. } => {
                    if candidates.len() > 1 {
                        c.is_static = false;
                    }
                }
                PlayerTypeRule::Defective {
                    probability,
                    candidates,
                    ..
                } => {
                    if *probability > F::zero() && candidates.len() > 1 {
                        c.is_static = false;
                    }
                }
            }
        }
        c
    }

    pub fn validate(&self, type_space_sizes: &[usize]) -> Result<(), String> {
        if self.players.len() != type_space_sizes.len() {
            return Err(format!(
                "type distribution covers {} players, game has {}",
                self.players.len(),
                type_space_sizes.len()
            ));
        }
        for (p, (rule, &size)) in self.players.iter().zip(type_space_sizes).enumerate() {
            let in_range = |i: &usize| *i < size;
            match rule {
                PlayerTypeRule::Fixed { index } if !in_range(index) => {
                    return Err(format!("player {p}: type index {index} out of range"))
                }
                PlayerTypeRule::Mixed { weights } => {
                    if weights.len() != size || !dist::is_distribution(weights) {
                        return Err(format!("player {p}: mixed weights must be a distribution over {size} types"));
                    }
                }
                PlayerTypeRule::Switching {
                    candidates,
                    min_interval,
                    max_interval,
                }
                | PlayerTypeRule::Defective {
                    candidates,
                    min_interval,
                    max_interval,
                    ..
                } => {
                    if candidates.is_empty() || !candidates.iter().all(in_range) {
                        return Err(format!("player {p}: bad switching candidates"));
                    }
                    if *min_interval == 0 || min_interval > max_interval {
                        return Err(format!("player {p}: bad switching interval"));
                    }
                    if let PlayerTypeRule::Defective { base, probability, .. } = rule {
                        if !in_range(base) || *probability < F::zero() || *probability > F::one() {
                            return Err(format!("player {p}: bad defective rule"));
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Draws the episode-level randomness (switch times, defective flags) and
    /// returns the realised schedule `t -> Δ(t, ·)`.
    pub fn instantiate(&self, mut rng: StreamRng) -> TypeSchedule<F> {
        let players = self
            .players
            .iter()
            .map(|rule| match rule {
                PlayerTypeRule::Fixed { index } => PlayerSchedule::Fixed(*index),
                PlayerTypeRule::Mixed { weights } => PlayerSchedule::Mixed(weights.clone()),
                PlayerTypeRule::Switching {
                    candidates,
                    min_interval,
                    max_interval,
                } => PlayerSchedule::segments(candidates, *min_interval, *max_interval, &mut rng),
                PlayerTypeRule::Defective {
                    base,
                    probability,
                    candidates,
                    min_interval,
                    max_interval,
                } => {
                    let u: f64 = rng.random();
                    if u < probability.as_f64() {
                        PlayerSchedule::segments_from(*base, candidates, *min_interval, *max_interval)
                    } else {
                        PlayerSchedule::Fixed(*base)
                    }
                }
            })
            .collect();
        TypeSchedule { players, rng }
    }
}

#[derive(Debug, Clone)]
enum PlayerSchedule<F> {
    Fixed(usize),
    Mixed(Vec<F>),
    Segments {
        /// `(start time, type)`, strictly increasing start times.
        segments: Vec<(usize, usize)>,
        candidates: Vec<usize>,
        min_interval: usize,
        max_interval: usize,
    },
}

impl<F: Real> PlayerSchedule<F> {
    fn segments(candidates: &[usize], lo: usize, hi: usize, rng: &mut StreamRng) -> Self {
        let first = dist::pick(candidates, rng);
        Self::segments_from(first, candidates, lo, hi)
    }

    fn segments_from(first: usize, candidates: &[usize], lo: usize, hi: usize) -> Self {
        PlayerSchedule::Segments {
            segments: vec![(0, first)],
            candidates: candidates.to_vec(),
            min_interval: lo,
            max_interval: hi,
        }
    }

    /// Extends the schedule until the segment containing `t` is closed.
    fn ensure(&mut self, t: usize, rng: &mut StreamRng) {
        if let PlayerSchedule::Segments {
            segments,
            candidates,
            min_interval,
            max_interval,
        } = self
        {
            while segments.last().unwrap().0 <= t {
                let &(start, current) = segments.last().unwrap();
                let len = rng.random_range(*min_interval..=*max_interval);
                let next = next_type(current, candidates, rng);
                segments.push((start + len, next));
            }
        }
    }

    fn type_at(&mut self, t: usize, rng: &mut StreamRng) -> Option<usize> {
        self.ensure(t, rng);
        match self {
            PlayerSchedule::Fixed(i) => Some(*i),
            PlayerSchedule::Mixed(_) => None,
            PlayerSchedule::Segments { segments, .. } => {
                let k = segments.partition_point(|&(start, _)| start <= t);
                Some(segments[k - 1].1)
            }
        }
    }
}

fn next_type(current: usize, candidates: &[usize], rng: &mut StreamRng) -> usize {
    let others: Vec<usize> = candidates.iter().copied().filter(|&c| c != current).collect();
    if others.is_empty() {
        current
    } else {
        dist::pick(&others, rng)
    }
}

/// A realised type distribution for one episode.
#[derive(Debug, Clone)]
pub struct TypeSchedule<F> {
    players: Vec<PlayerSchedule<F>>,
    rng: StreamRng,
}

impl<F: Real> TypeSchedule<F> {
    /// Marginal distribution of one player's type at time `t`.
    pub fn marginal(&mut self, player: usize, t: usize, space: usize) -> Vec<F> {
        let rng = &mut self.rng;
        let ps = &mut self.players[player];
        match ps {
            PlayerSchedule::Mixed(w) => w.clone(),
            _ => dist::point_mass(space, ps.type_at(t, rng).expect("pure schedule")),
        }
    }

    /// Δ(t, θ).
    pub fn probability(&mut self, t: usize, joint: &[usize]) -> F {
        let mut p = F::one();
        for (player, &theta) in joint.iter().enumerate() {
            let rng = &mut self.rng;
            let ps = &mut self.players[player];
            let q = match ps {
                PlayerSchedule::Mixed(w) => w.get(theta).copied().unwrap_or(F::zero()),
                _ => {
                    if ps.type_at(t, rng) == Some(theta) {
                        F::one()
                    } else {
                        F::zero()
                    }
                }
            };
            p = p * q;
        }
        p
    }

    /// Samples θ^t. Pure components consume no randomness from `rng`.
    pub fn sample(&mut self, t: usize, rng: &mut StreamRng) -> JointType {
        let n = self.players.len();
        (0..n)
            .map(|p| {
                let own = &mut self.rng;
                match &mut self.players[p] {
                    PlayerSchedule::Mixed(w) => dist::sample_index(w, rng),
                    other => other.type_at(t, own).expect("pure schedule"),
                }
            })
            .collect()
    }
}
