use serde::{Deserialize, Serialize};

use super::BehaviorType;
use crate::dist;
use crate::matrix::pd::{C, D};
use crate::sbg::History;
use crate::scalar::Real;

/// Prisoner's Dilemma types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PdType {
    AlwaysC,
    TitForTat,
    TitFor2Tats,
    Optimistic,
    Pessimistic,
}

impl PdType {
    pub const ALL: [PdType; 5] = [
        PdType::AlwaysC,
        PdType::TitForTat,
        PdType::TitFor2Tats,
        PdType::Optimistic,
        PdType::Pessimistic,
    ];
}

/// `mu`: own cooperations up to `t-2`; `reciprocated`: those answered by
/// cooperation one round later.
fn counters<S>(h: &History<S>, t: usize, me: usize) -> (u32, u32) {
    let opp = 1 - me;
    let mut mu = 0;
    let mut rec = 0;
    for tau in 0..t.saturating_sub(1) {
        if h.played(tau, me) == C {
            mu += 1;
            if h.played(tau + 1, opp) == C {
                rec += 1;
            }
        }
    }
    (mu, rec)
}

fn p_coop<F: Real>(p: F) -> Vec<F> {
    vec![p, F::one() - p]
}

impl<S: Send + Sync, F: Real> BehaviorType<S, F> for PdType {
    fn name(&self) -> String {
        format!("{self:?}")
    }

    fn policy(&self, h: &History<S>, t: usize, me: usize) -> Vec<F> {
        let opp = 1 - me;
        let last_opp = |k: usize| h.played(t - k, opp);
        match self {
            PdType::AlwaysC => dist::point_mass(2, C),
            PdType::TitForTat => {
                if t == 0 {
                    dist::point_mass(2, C)
                } else {
                    dist::point_mass(2, last_opp(1))
                }
            }
            PdType::TitFor2Tats => {
                if t < 2 || (last_opp(1) == C && last_opp(2) == C) {
                    dist::point_mass(2, C)
                } else {
                    dist::point_mass(2, D)
                }
            }
            PdType::Optimistic => {
                if t < 2 || last_opp(1) == C {
                    return dist::point_mass(2, C);
                }
                let (mu, rec) = counters(h, t, me);
                if mu == 0 {
                    return dist::point_mass(2, C);
                }
                let sigma = F::from_u32(rec).unwrap() / F::from_u32(mu).unwrap();
                p_coop(F::lit(0.2) + F::lit(0.8) * sigma)
            }
            PdType::Pessimistic => {
                if t < 2 || last_opp(1) == D {
                    return dist::point_mass(2, D);
                }
                let (mu, rec) = counters(h, t, me);
                let sigma = if mu > 0 {
                    F::from_u32(rec).unwrap() / F::from_u32(mu).unwrap()
                } else {
                    F::zero()
                };
                let defect = F::lit(0.2) + F::lit(0.8) * sigma;
                p_coop(F::one() - defect)
            }
        }
    }

    fn summary(&self, h: &History<S>, t: usize, me: usize) -> Option<u128> {
        let joint = |k: usize| -> u128 {
            if t >= k {
                let a = h.action(t - k);
                1 + (a[0] * 2 + a[1]) as u128
            } else {
                0
            }
        };
        let base = t.min(2) as u128 | joint(1) << 2 | joint(2) << 5;
        Some(match self {
            PdType::AlwaysC => 0,
            PdType::TitForTat | PdType::TitFor2Tats => base,
            PdType::Optimistic | PdType::Pessimistic => {
                let (mu, rec) = counters(h, t, me);
                base | (mu as u128) << 8 | (rec as u128) << 40
            }
        })
    }
}
