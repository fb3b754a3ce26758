use serde::{Deserialize, Serialize};

use super::BehaviorType;
use crate::dist;
use crate::matrix::MatrixGame;
use crate::sbg::History;
use crate::scalar::Real;

/// Rock-Paper-Scissors types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RpsType {
    Copycat,
    RetryIfWon,
    /// Avoids its own recent actions, looking back `h` rounds.
    IFocused(usize),
    /// Best response to an `IFocused(h)` model of the opponent.
    JFocused(usize),
}

impl RpsType {
    pub const TABLE: [RpsType; 6] = [
        RpsType::Copycat,
        RpsType::RetryIfWon,
        RpsType::IFocused(1),
        RpsType::IFocused(2),
        RpsType::JFocused(1),
        RpsType::JFocused(2),
    ];
}

/// An RPS type bound to the stage game it evaluates payoffs with.
#[derive(Debug, Clone)]
pub struct RpsBehavior<F> {
    pub kind: RpsType,
    pub stage: MatrixGame<F>,
}

/// `g(a, x)` normalised; uniform when every weight is zero (only at `t = 0`).
pub fn focused_policy<S, F: Real>(h: &History<S>, t: usize, me: usize, depth: usize, actions: usize) -> Vec<F> {
    let x = t.min(depth);
    let mut g = vec![F::from_usize_lossy(x); actions];
    for tau in 1..=x {
        let a = h.played(t - tau, me);
        g[a] = g[a] - F::from_usize_lossy(x + 1 - tau);
    }
    for v in g.iter_mut() {
        *v = v.max(F::zero());
    }
    if dist::normalize(&mut g) {
        g
    } else {
        dist::uniform(actions)
    }
}

impl<S: Send + Sync, F: Real> BehaviorType<S, F> for RpsBehavior<F> {
    fn name(&self) -> String {
        match self.kind {
            RpsType::IFocused(h) => format!("i-focused({h})"),
            RpsType::JFocused(h) => format!("j-focused({h})"),
            k => format!("{k:?}"),
        }
    }

    fn policy(&self, h: &History<S>, t: usize, me: usize) -> Vec<F> {
        let opp = 1 - me;
        let n = self.stage.num_actions(me);
        match self.kind {
            RpsType::Copycat => {
                if t == 0 {
                    dist::uniform(n)
                } else {
                    dist::point_mass(n, h.played(t - 1, opp))
                }
            }
            RpsType::RetryIfWon => {
                if t == 0 {
                    return dist::uniform(n);
                }
                let own = h.played(t - 1, me);
                if self.stage.payoff_for(me, own, h.played(t - 1, opp)) < F::zero() {
                    dist::uniform(n)
                } else {
                    dist::point_mass(n, own)
                }
            }
            RpsType::IFocused(depth) => focused_policy(h, t, me, depth, n),
            RpsType::JFocused(depth) => {
                let model: Vec<F> = focused_policy(h, t, opp, depth, self.stage.num_actions(opp));
                let values: Vec<F> = (0..n)
                    .map(|a| {
                        model
                            .iter()
                            .enumerate()
                            .map(|(b, &p)| p * self.stage.payoff_for(me, a, b))
                            .sum()
                    })
                    .collect();
                dist::uniform_over(n, &dist::argmax_set(&values, F::norm_tolerance()))
            }
        }
    }

    fn summary(&self, h: &History<S>, t: usize, _me: usize) -> Option<u128> {
        let n = self.stage.num_actions(0) * self.stage.num_actions(1);
        let joint = |k: usize| -> u128 {
            if t >= k {
                let a = h.action(t - k);
                1 + (a[0] * self.stage.num_actions(1) + a[1]) as u128
            } else {
                0
            }
        };
        let width = (n + 1) as u128;
        Some(t.min(2) as u128 + 3 * (joint(1) + width * joint(2)))
    }
}
