use serde::{Deserialize, Serialize};

use super::BehaviorType;
use crate::dist;
use crate::foraging::{ForagingState, Move, Pos, NUM_ACTIONS};
use crate::sbg::History;
use crate::scalar::Real;

/// The four fixed foraging behaviours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    /// Closest visible food.
    H1,
    /// Visible food closest to the centre of the visible players.
    H2,
    /// Closest visible food it can load alone.
    H3,
    /// Visible food closest to the centre of the visible players that they
    /// can load together.
    H4,
}

/// A heuristic with sight radius `sigma` (`None` sees everything).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicType {
    pub variant: Heuristic,
    pub sigma: Option<f64>,
}

impl HeuristicType {
    pub fn new(variant: Heuristic, sigma: Option<f64>) -> Self {
        Self { variant, sigma }
    }

    fn sees(&self, from: Pos, to: Pos) -> bool {
        self.sigma.is_none_or(|r| from.euclid(to) <= r)
    }

    /// Index of the food this heuristic heads for, if any is eligible.
    pub fn target(&self, s: &ForagingState, player: usize) -> Option<usize> {
        let me = s.players[player];
        let visible: Vec<usize> = (0..s.players.len())
            .filter(|&v| v == player || self.sees(me.pos, s.players[v].pos))
            .collect();
        let n = visible.len() as f64;
        let centre = (
            visible.iter().map(|&v| s.players[v].pos.x as f64).sum::<f64>() / n,
            visible.iter().map(|&v| s.players[v].pos.y as f64).sum::<f64>() / n,
        );
        let group_level: u32 = visible.iter().map(|&v| s.players[v].level).sum();
        let from_centre = |p: Pos| ((p.x as f64 - centre.0).powi(2) + (p.y as f64 - centre.1).powi(2)).sqrt();

        let mut best: Option<(usize, f64)> = None;
        for (k, f) in s.foods.iter().enumerate() {
            if !f.present || !self.sees(me.pos, f.pos) {
                continue;
            }
            let key = match self.variant {
                Heuristic::H1 => me.pos.euclid(f.pos),
                Heuristic::H2 => from_centre(f.pos),
                Heuristic::H3 if f.level <= me.level => me.pos.euclid(f.pos),
                Heuristic::H4 if f.level <= group_level => from_centre(f.pos),
                _ => continue,
            };
            if best.is_none_or(|(_, d)| key < d) {
                best = Some((k, key));
            }
        }
        best.map(|(k, _)| k)
    }
}

/// Greedy step from `from` toward the free cell next to `food` that is
/// closest to `from`.
///
/// Moves along the axis of larger displacement first (ties in N, E, S, W
/// order); if that cell is blocked the other axis is tried, and if both are
/// blocked the first move is returned anyway and will be a no-op.
pub fn step_toward(s: &ForagingState, from: Pos, food: Pos) -> Move {
    let mut target = food;
    let mut best = f64::INFINITY;
    for cell in food.neighbours() {
        if s.is_free(cell) && from.euclid(cell) < best {
            best = from.euclid(cell);
            target = cell;
        }
    }
    let dx = target.x - from.x;
    let dy = target.y - from.y;
    let vertical = match dy.signum() {
        -1 => Some(Move::North),
        1 => Some(Move::South),
        _ => None,
    };
    let horizontal = match dx.signum() {
        1 => Some(Move::East),
        -1 => Some(Move::West),
        _ => None,
    };
    let mut order: Vec<Move> = match dy.abs().cmp(&dx.abs()) {
        std::cmp::Ordering::Greater => [vertical, horizontal],
        std::cmp::Ordering::Less => [horizontal, vertical],
        std::cmp::Ordering::Equal => {
            let mut both = [vertical, horizontal];
            both.sort_by_key(|m| m.map(Move::index));
            both
        }
    }
    .into_iter()
    .flatten()
    .collect();
    if order.is_empty() {
        order.push(Move::Load);
    }
    order
        .iter()
        .copied()
        .find(|m| s.is_free(from.offset(*m)))
        .unwrap_or(order[0])
}

impl<F: Real> BehaviorType<ForagingState, F> for HeuristicType {
    fn name(&self) -> String {
        let v = format!("{:?}", self.variant);
        match self.sigma {
            None => v,
            Some(r) => format!("{v}[sigma={r}]"),
        }
    }

    fn policy(&self, history: &History<ForagingState>, t: usize, player: usize) -> Vec<F> {
        let s = history.state(t);
        let me = s.players[player].pos;
        match self.target(s, player) {
            Some(k) => {
                let food = s.foods[k].pos;
                let m = if me.is_adjacent(food) {
                    Move::Load
                } else {
                    step_toward(s, me, food)
                };
                dist::point_mass(NUM_ACTIONS, m.index())
            }
            None => dist::uniform_over(NUM_ACTIONS, &[0, 1, 2, 3]),
        }
    }

    fn summary(&self, _history: &History<ForagingState>, _t: usize, _player: usize) -> Option<u128> {
        None
    }
}
