//! Planning against opponent models: the Bellman-style HBA value and the
//! exact finite-horizon trajectory planner for repeated matrix games.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::behavior::{mixture, SharedType};
use crate::dist;
use crate::matrix::RepeatedGame;
use crate::sbg::{GameModel, History};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("match is over: t={t} but the match lasts {t_star} rounds")]
    MatchOver { t: usize, t_star: usize },
    #[error("planning depth {depth} exceeds the configured cap {cap}")]
    HorizonLimit { depth: usize, cap: usize },
    #[error("the exact planner supports two-player games only")]
    NotTwoPlayer,
}

/// Predicts other players' actions along projected histories.
pub trait OpponentModel<S, F: Real> {
    /// Distribution over `player`'s actions at the end of `history`. `own` is
    /// the planning agent's action at the same step; only conditional models
    /// use it.
    fn predict(&self, history: &History<S>, player: usize, own: usize) -> Vec<F>;

    /// Statistic of `history` that fixes every later prediction, if known.
    fn key(&self, _history: &History<S>) -> Option<Vec<u128>> {
        None
    }
}

/// One player's hypothesised types and their weights; empty for the planner.
pub type TypeBelief<'a, S, F> = (&'a [SharedType<S, F>], &'a [F]);

/// Frozen posterior over per-opponent type spaces.
pub struct TypeMixture<'a, S, F: Real> {
    /// Per player: hypothesised types and their probabilities. The entry for
    /// the planning agent itself is ignored.
    pub players: Vec<TypeBelief<'a, S, F>>,
}

impl<S, F: Real> OpponentModel<S, F> for TypeMixture<'_, S, F> {
    fn predict(&self, history: &History<S>, player: usize, _own: usize) -> Vec<F> {
        let (types, weights) = self.players[player];
        mixture(types, weights, history, history.t(), player)
    }

    fn key(&self, history: &History<S>) -> Option<Vec<u128>> {
        let t = history.t();
        let mut key = Vec::new();
        for (j, (types, weights)) in self.players.iter().enumerate() {
            for (ty, w) in types.iter().zip(weights.iter()) {
                if *w != F::zero() {
                    key.push(ty.summary(history, t, j)?);
                }
            }
        }
        Some(key)
    }
}

impl<S, F: Real, M: OpponentModel<S, F> + ?Sized> OpponentModel<S, F> for &M {
    fn predict(&self, history: &History<S>, player: usize, own: usize) -> Vec<F> {
        (**self).predict(history, player, own)
    }

    fn key(&self, history: &History<S>) -> Option<Vec<u128>> {
        (**self).key(history)
    }
}

/// Enumerates the other players' joint actions with their probabilities.
pub(crate) fn opponent_joints<F: Real>(me: usize, own: usize, preds: &[Vec<F>]) -> Vec<(Vec<usize>, F)> {
    let mut out = vec![(Vec::new(), F::one())];
    for (j, p) in preds.iter().enumerate() {
        let mut next = Vec::new();
        for (partial, q) in out {
            if j == me {
                let mut v = partial.clone();
                v.push(own);
                next.push((v, q));
                continue;
            }
            for (a, &pa) in p.iter().enumerate() {
                if pa == F::zero() {
                    continue;
                }
                let mut v = partial.clone();
                v.push(a);
                next.push((v, q * pa));
            }
        }
        out = next;
    }
    out
}

/// The HBA expected long-term payoff of each own action at the end of the
/// projected history, with the opponent model frozen.
///
/// `depth` counts future steps; at depth 0 only immediate payoffs count.
pub struct HbaValue<'g, F: Real, G: GameModel<F>> {
    pub game: &'g G,
    pub me: usize,
    pub gamma: F,
    pub depth_cap: usize,
    memo: HashMap<(G::State, Vec<u128>, usize), Vec<F>>,
}

impl<'g, F: Real, G: GameModel<F>> HbaValue<'g, F, G> {
    pub fn new(game: &'g G, me: usize, gamma: F, depth_cap: usize) -> Self {
        Self {
            game,
            me,
            gamma,
            depth_cap,
            memo: HashMap::new(),
        }
    }

    pub fn values<M: OpponentModel<G::State, F>>(
        &mut self,
        history: &History<G::State>,
        depth: usize,
        model: &M,
    ) -> Result<Vec<F>, PlanError> {
        if depth > self.depth_cap {
            return Err(PlanError::HorizonLimit {
                depth,
                cap: self.depth_cap,
            });
        }
        self.memo.clear();
        let mut h = history.clone();
        Ok(self.recurse(&mut h, depth, model))
    }

    fn recurse<M: OpponentModel<G::State, F>>(&mut self, h: &mut History<G::State>, depth: usize, model: &M) -> Vec<F> {
        let state = h.current().clone();
        let key = model.key(h).map(|k| (state.clone(), k, depth));
        if let Some(v) = key.as_ref().and_then(|k| self.memo.get(k)) {
            return v.clone();
        }
        let n = self.game.num_players();
        let own_actions = self.game.num_actions(self.me);
        let mut values = Vec::with_capacity(own_actions);
        for own in 0..own_actions {
            let preds: Vec<Vec<F>> = (0..n)
                .map(|j| if j == self.me { Vec::new() } else { model.predict(h, j, own) })
                .collect();
            let mut e = F::zero();
            for (joint, p) in opponent_joints(self.me, own, &preds) {
                let u = self.game.payoffs(&state, &joint)[self.me];
                let mut q = F::zero();
                for (next, pt) in self.game.transitions(&state, &joint) {
                    let mut future = F::zero();
                    if depth > 0 && !self.game.is_terminal(&next) {
                        let t = h.t();
                        h.push(joint.clone(), next);
                        let v = self.recurse(h, depth - 1, model);
                        h.truncate(t);
                        future = v.into_iter().fold(F::neg_infinity(), F::max);
                    }
                    q = q + pt * (u + self.gamma * future);
                }
                e = e + p * q;
            }
            values.push(e);
        }
        if let Some(k) = key {
            self.memo.insert(k, values.clone());
        }
        values
    }
}

/// Exact planning over all own-action and opponent-action sequences up to
/// the planning horizon, for two-player repeated matrix games.
///
/// The value of an own action sums, over every trajectory that starts with
/// it, the trajectory's probability under the opponent model times its
/// undiscounted payoff sum. Own future actions are enumerated, not
/// maximised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactPlanner {
    /// Planning horizon `l*`.
    pub horizon: usize,
    /// Match length `t*`.
    pub rounds: usize,
}

impl ExactPlanner {
    pub fn new(horizon: usize, rounds: usize) -> Self {
        Self { horizon, rounds }
    }

    /// `l = min(l*, t* - t) - 1`: extra steps after the current one.
    pub fn lookahead(&self, t: usize) -> Result<usize, PlanError> {
        if t >= self.rounds {
            return Err(PlanError::MatchOver { t, t_star: self.rounds });
        }
        Ok(self.horizon.min(self.rounds - t).max(1) - 1)
    }

    pub fn action_values<F: Real, M: OpponentModel<usize, F>>(
        &self,
        game: &RepeatedGame<F>,
        history: &History<usize>,
        me: usize,
        model: &M,
    ) -> Result<Vec<F>, PlanError> {
        let l = self.lookahead(history.t())?;
        let mut search = Search {
            game,
            me,
            model,
            memo: HashMap::new(),
        };
        let mut h = history.clone();
        Ok((0..game.stage.num_actions(me))
            .map(|a| search.step(&mut h, a, l))
            .collect())
    }

    /// Samples uniformly among the maximising actions.
    pub fn choose<F: Real, M: OpponentModel<usize, F>, R: Rng + ?Sized>(
        &self,
        game: &RepeatedGame<F>,
        history: &History<usize>,
        me: usize,
        model: &M,
        rng: &mut R,
    ) -> Result<(usize, Vec<F>), PlanError> {
        let values = self.action_values(game, history, me, model)?;
        Ok((pick_argmax(&values, rng), values))
    }
}

/// Uniform draw from the argmax set, with a tolerance relative to the
/// values' magnitude.
pub fn pick_argmax<F: Real, R: Rng + ?Sized>(values: &[F], rng: &mut R) -> usize {
    let scale = values.iter().fold(F::one(), |m, v| m.max(v.abs()));
    let best = dist::argmax_set(values, F::norm_tolerance() * scale);
    dist::pick(&best, rng)
}

struct Search<'a, F: Real, M> {
    game: &'a RepeatedGame<F>,
    me: usize,
    model: &'a M,
    memo: HashMap<(Vec<u128>, usize), F>,
}

impl<F: Real, M: OpponentModel<usize, F>> Search<'_, F, M> {
    fn own_count(&self) -> F {
        F::from_usize_lossy(self.game.stage.num_actions(self.me))
    }

    /// Value of playing `own` now, with `rest` further steps enumerated.
    fn step(&mut self, h: &mut History<usize>, own: usize, rest: usize) -> F {
        let opp = 1 - self.me;
        let p = self.model.predict(h, opp, own);
        let weight = self.own_count().powi(rest as i32);
        let t = h.t();
        let mut total = F::zero();
        for (b, &pb) in p.iter().enumerate() {
            if pb == F::zero() {
                continue;
            }
            let mut joint = vec![0; 2];
            joint[self.me] = own;
            joint[opp] = b;
            let u = self.game.stage.payoff(joint[0], joint[1])[self.me];
            h.push(joint, t + 1);
            let future = self.tail(h, rest);
            h.truncate(t);
            total = total + pb * (u * weight + future);
        }
        total
    }

    /// Sum over all continuations of `k` steps.
    fn tail(&mut self, h: &mut History<usize>, k: usize) -> F {
        if k == 0 {
            return F::zero();
        }
        let key = self.model.key(h).map(|key| (key, k));
        if let Some(v) = key.as_ref().and_then(|key| self.memo.get(key)) {
            return *v;
        }
        let v = (0..self.game.stage.num_actions(self.me))
            .map(|a| self.step(h, a, k - 1))
            .sum();
        if let Some(key) = key {
            self.memo.insert(key, v);
        }
        v
    }
}
