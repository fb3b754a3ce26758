use serde::{Deserialize, Serialize};

use super::BehaviorType;
use crate::dist;
use crate::foraging::{ForagingState, Pos};
use crate::posterior::TimeWeight;
use crate::sbg::History;
use crate::scalar::Real;

/// Nonnegative distance between two states from one player's perspective.
pub trait StateDistance<S>: Send + Sync {
    fn name(&self) -> String;
    fn distance(&self, player: usize, s1: &S, s2: &S) -> f64;
}

/// The four foraging distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForagingDistance {
    /// Zero for identical states, infinite otherwise.
    D1,
    /// Infinite when the player's position and the food set both agree, as
    /// printed. `D2Negated` flips the condition.
    D2,
    D2Negated,
    /// Player displacement plus the foods present in only one state,
    /// weighted by their proximity to the player.
    D3,
    /// `D3` plus the displacement of every other player, weighted by its
    /// proximity to the player.
    D4,
}

fn phi(a: Pos, b: Pos) -> f64 {
    0.5 * (1.0 + a.euclid(b)).ln()
}

fn dist_to(p: Pos, mu: (f64, f64)) -> f64 {
    ((p.x as f64 - mu.0).powi(2) + (p.y as f64 - mu.1).powi(2)).sqrt()
}

/// `x^(-3/2)`, infinite at zero.
fn inv_pow(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        x.powf(-1.5)
    }
}

fn same_foods(s1: &ForagingState, s2: &ForagingState) -> bool {
    s1.foods.iter().zip(&s2.foods).all(|(a, b)| a.present == b.present)
}

impl ForagingDistance {
    fn oriented(self, j: usize, s1: &ForagingState, s2: &ForagingState) -> f64 {
        match self {
            ForagingDistance::D1 => {
                if s1 == s2 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ForagingDistance::D2 | ForagingDistance::D2Negated => {
                let agree = s1.players[j].pos == s2.players[j].pos && same_foods(s1, s2);
                if agree == (self == ForagingDistance::D2) {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            ForagingDistance::D3 | ForagingDistance::D4 => {
                let (p1, p2) = (s1.players[j].pos, s2.players[j].pos);
                let mu = (
                    p1.x as f64 + 0.5 * (p2.x - p1.x) as f64,
                    p1.y as f64 + 0.5 * (p2.y - p1.y) as f64,
                );
                let mut d = phi(p1, p2);
                for (f1, f2) in s1.foods.iter().zip(&s2.foods) {
                    if f1.present != f2.present {
                        d += inv_pow(dist_to(f1.pos, mu));
                    }
                }
                if self == ForagingDistance::D4 {
                    for v in (0..s1.players.len()).filter(|&v| v != j) {
                        let (q1, q2) = (s1.players[v].pos, s2.players[v].pos);
                        let omega = dist_to(q1, mu).min(dist_to(q2, mu));
                        if omega == 0.0 {
                            return f64::INFINITY;
                        }
                        d += phi(q1, q2) * inv_pow(omega);
                    }
                }
                d
            }
        }
    }
}

impl StateDistance<ForagingState> for ForagingDistance {
    fn name(&self) -> String {
        format!("{self:?}").to_lowercase()
    }

    /// Symmetrised: the smaller of both orientations.
    fn distance(&self, j: usize, s1: &ForagingState, s2: &ForagingState) -> f64 {
        self.oriented(j, s1, s2).min(self.oriented(j, s2, s1))
    }
}

/// Generalises observed actions to similar states: the probability of an
/// action is proportional to the time-weighted similarity of the states in
/// which it was played before.
pub struct ConceptualType<S> {
    pub distance: Box<dyn StateDistance<S>>,
    pub radius: f64,
    pub weight: TimeWeight,
    pub actions: usize,
}

impl<S> ConceptualType<S> {
    pub fn new(distance: Box<dyn StateDistance<S>>, radius: f64, weight: TimeWeight, actions: usize) -> Self {
        assert!(radius > 0.0);
        Self {
            distance,
            radius,
            weight,
            actions,
        }
    }

    pub fn similarity(&self, player: usize, s1: &S, s2: &S) -> f64 {
        (1.0 - self.distance.distance(player, s1, s2) / self.radius).max(0.0)
    }
}

impl<S: Send + Sync, F: Real> BehaviorType<S, F> for ConceptualType<S> {
    fn name(&self) -> String {
        format!("ctype[{}]", self.distance.name())
    }

    fn policy(&self, h: &History<S>, t: usize, player: usize) -> Vec<F> {
        // Past steps outside the weight's support contribute nothing, and an
        // all-zero sum is answered with the uniform distribution, which is
        // also the answer when no past state is similar at all.
        let from = self.weight.support().map_or(0, |m| t.saturating_sub(m));
        let now = h.state(t);
        let mut w = vec![F::zero(); self.actions];
        for tau in from..t {
            let f: F = self.weight.eval(t - tau);
            if f == F::zero() {
                continue;
            }
            let g = self.similarity(player, now, h.state(tau));
            if g > 0.0 {
                let a = h.played(tau, player);
                w[a] = w[a] + f * F::lit(g);
            }
        }
        if dist::normalize(&mut w) {
            w
        } else {
            dist::uniform(self.actions)
        }
    }
}
