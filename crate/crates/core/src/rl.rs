//! The sampling-based reinforcement learning framework shared by HBA, JAL,
//! CJAL and WoLF-PHC: a joint-action Q-table with eligibility traces that is
//! trained on real steps and on simulated rollouts from the current state.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::behavior::{mixture, SharedType};
use crate::dist;
use crate::planner::opponent_joints;
use crate::posterior::{LikelihoodMode, Posterior};
use crate::rng::StreamRng;
use crate::sbg::{Controller, GameModel, History, StepContext};
use crate::scalar::Real;

/// Hyperparameters. Defaults are the foraging settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlParams {
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub e_min: f64,
    /// Exploration on real steps.
    pub epsilon_real: f64,
    /// Exploration inside simulated rollouts.
    pub epsilon_sim: f64,
    /// Rollouts after every real step.
    pub expansions: usize,
    /// Steps per rollout.
    pub depth: usize,
}

impl Default for RlParams {
    fn default() -> Self {
        Self {
            beta: 0.2,
            gamma: 0.9,
            lambda: 0.9,
            e_min: 0.01,
            epsilon_real: 0.0,
            epsilon_sim: 0.2,
            expansions: 3,
            depth: 20,
        }
    }
}

impl RlParams {
    pub fn validate(&self) -> Result<(), String> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(format!("{name} must lie in [0, 1], got {v}"))
            }
        };
        unit("beta", self.beta)?;
        unit("gamma", self.gamma)?;
        unit("lambda", self.lambda)?;
        unit("epsilon_real", self.epsilon_real)?;
        unit("epsilon_sim", self.epsilon_sim)?;
        if !(self.e_min > 0.0) {
            return Err(format!("e_min must be positive, got {}", self.e_min));
        }
        Ok(())
    }
}

/// Sparse Q-table over interned state ids; missing entries read as zero.
#[derive(Debug, Clone, Default)]
pub struct QTable<F> {
    width: usize,
    rows: HashMap<u32, Vec<F>>,
}

impl<F: Real> QTable<F> {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: HashMap::new(),
        }
    }

    pub fn get(&self, s: u32, a: usize) -> F {
        self.rows.get(&s).map_or(F::zero(), |r| r[a])
    }

    pub fn add(&mut self, s: u32, a: usize, delta: F) {
        let w = self.width;
        let row = self.rows.entry(s).or_insert_with(|| vec![F::zero(); w]);
        row[a] = row[a] + delta;
    }

    pub fn row(&self, s: u32) -> Option<&[F]> {
        self.rows.get(&s).map(|r| r.as_slice())
    }

    pub fn clear(&mut self) {
        self.rows.clear();
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Eligibility trace. Entries that fall below the cutoff are dropped since
/// they never take part in an update again.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace<F> {
    entries: Vec<(u32, usize, F)>,
}

impl<F: Real> Trace<F> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn get(&self, s: u32, a: usize) -> F {
        self.entries
            .iter()
            .find(|e| e.0 == s && e.1 == a)
            .map_or(F::zero(), |e| e.2)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// `delta = beta (u + gamma * next_value - Q(s,a))`, then every entry
    /// at or above `e_min` receives `delta * e` and decays by `lambda`.
    pub fn update(&mut self, q: &mut QTable<F>, s: u32, a: usize, u: F, next_value: F, p: &RlParams) -> F {
        let delta = F::lit(p.beta) * (u + F::lit(p.gamma) * next_value - q.get(s, a));
        match self.entries.iter_mut().find(|e| e.0 == s && e.1 == a) {
            Some(e) => e.2 = F::one(),
            None => self.entries.push((s, a, F::one())),
        }
        let e_min = F::lit(p.e_min);
        let lambda = F::lit(p.lambda);
        self.entries.retain_mut(|(es, ea, e)| {
            if *e < e_min {
                return false;
            }
            q.add(*es, *ea, delta * *e);
            *e = *e * lambda;
            true
        });
        delta
    }
}

/// Action counts per context, for JAL (per state) and CJAL (per state and
/// own action). Unseen contexts predict the uniform distribution.
#[derive(Debug, Clone)]
pub struct FrequencyModel<K> {
    conditional: bool,
    actions: Vec<usize>,
    counts: HashMap<(K, usize, usize), Vec<u32>>,
}

impl<K: Hash + Eq + Clone> FrequencyModel<K> {
    /// `actions[j]` is player `j`'s action count.
    pub fn new(actions: Vec<usize>, conditional: bool) -> Self {
        Self {
            conditional,
            actions,
            counts: HashMap::new(),
        }
    }

    pub fn is_conditional(&self) -> bool {
        self.conditional
    }

    pub fn clear(&mut self) {
        self.counts.clear();
    }

    fn own_slot(&self, own: usize) -> usize {
        if self.conditional {
            own
        } else {
            0
        }
    }

    /// Records the joint action `joint` taken in context `key` by the team
    /// around player `me`.
    pub fn observe(&mut self, key: &K, me: usize, joint: &[usize]) {
        let own = self.own_slot(joint[me]);
        for (j, &a) in joint.iter().enumerate() {
            if j == me {
                continue;
            }
            let n = self.actions[j];
            let c = self
                .counts
                .entry((key.clone(), own, j))
                .or_insert_with(|| vec![0; n]);
            c[a] += 1;
        }
    }

    pub fn counts(&self, key: &K, player: usize, own: usize) -> Option<&[u32]> {
        self.counts
            .get(&(key.clone(), self.own_slot(own), player))
            .map(|v| v.as_slice())
    }

    pub fn predict<F: Real>(&self, key: &K, player: usize, own: usize) -> Vec<F> {
        match self.counts(key, player, own) {
            Some(c) => {
                let total: u32 = c.iter().sum();
                c.iter()
                    .map(|&k| F::from_u32(k).unwrap() / F::from_u32(total).unwrap())
                    .collect()
            }
            None => dist::uniform(self.actions[player]),
        }
    }
}

/// WoLF-PHC learning rate when winning; twice this when losing.
pub fn wolf_rate<F: Real>(t: usize) -> F {
    F::one() / (F::lit(1000.0) + F::from_usize_lossy(t) / F::lit(10.0))
}

/// Mixed and average policies of WoLF-PHC per state.
#[derive(Debug, Clone, Default)]
pub struct WolfPolicy<F> {
    actions: usize,
    pi: HashMap<u32, Vec<F>>,
    avg: HashMap<u32, Vec<F>>,
    visits: HashMap<u32, u32>,
}

impl<F: Real> WolfPolicy<F> {
    pub fn new(actions: usize) -> Self {
        Self {
            actions,
            pi: HashMap::new(),
            avg: HashMap::new(),
            visits: HashMap::new(),
        }
    }

    pub fn clear(&mut self) {
        self.pi.clear();
        self.avg.clear();
        self.visits.clear();
    }

    pub fn policy(&self, s: u32) -> Vec<F> {
        self.pi.get(&s).cloned().unwrap_or_else(|| dist::uniform(self.actions))
    }

    pub fn average(&self, s: u32) -> Vec<F> {
        self.avg.get(&s).cloned().unwrap_or_else(|| dist::uniform(self.actions))
    }

    /// One hill-climbing step at `s` given the state's action values.
    ///
    /// The average policy is updated first; the agent is winning when its
    /// current policy scores strictly better than the average. Every
    /// non-maximising action then gives up `min(pi(a), rate / (|A| - 1))`
    /// and the freed mass is shared equally by the maximising actions.
    pub fn step(&mut self, s: u32, q: &[F], t: usize) {
        let n = self.actions;
        let uniform = dist::uniform::<F>(n);
        let pi = self.pi.entry(s).or_insert_with(|| uniform.clone());
        let avg = self.avg.entry(s).or_insert_with(|| uniform.clone());
        let c = self.visits.entry(s).or_insert(0);
        *c += 1;
        let cf = F::from_u32(*c).unwrap();
        for (m, p) in avg.iter_mut().zip(pi.iter()) {
            *m = *m + (*p - *m) / cf;
        }
        let score = |w: &[F]| -> F { w.iter().zip(q).map(|(a, b)| *a * *b).sum() };
        let winning = score(pi) > score(avg);
        let rate = if winning {
            wolf_rate::<F>(t)
        } else {
            F::lit(2.0) * wolf_rate::<F>(t)
        };
        let best = dist::argmax_set(q, F::norm_tolerance());
        if best.len() == n {
            return;
        }
        let share = rate / F::from_usize_lossy(n - 1);
        let mut freed = F::zero();
        for a in (0..n).filter(|a| !best.contains(a)) {
            let d = pi[a].min(share);
            pi[a] = pi[a] - d;
            freed = freed + d;
        }
        let gain = freed / F::from_usize_lossy(best.len());
        for &a in &best {
            pi[a] = pi[a] + gain;
        }
    }
}

/// How an HBA agent obtains its belief over one opponent's types.
pub enum Belief<S, F: Real> {
    /// Posterior over user-defined types.
    Posterior {
        types: Vec<SharedType<S, F>>,
        posterior: Posterior<F>,
    },
    /// Knows the true type at every step (reference agent). `types` is the
    /// opponent's true type space.
    Oracle { types: Vec<SharedType<S, F>>, current: usize },
}

impl<S, F: Real> Belief<S, F> {
    pub fn posterior(types: Vec<SharedType<S, F>>, mode: LikelihoodMode) -> Self {
        let labels = types.iter().map(|t| t.name()).collect();
        Belief::Posterior {
            posterior: Posterior::uniform(labels, mode),
            types,
        }
    }

    pub fn oracle(types: Vec<SharedType<S, F>>) -> Self {
        Belief::Oracle { types, current: 0 }
    }

    pub fn types(&self) -> &[SharedType<S, F>] {
        match self {
            Belief::Posterior { types, .. } | Belief::Oracle { types, .. } => types,
        }
    }

    pub fn weights(&self) -> Vec<F> {
        match self {
            Belief::Posterior { posterior, .. } => posterior.probabilities().to_vec(),
            Belief::Oracle { types, current } => dist::point_mass(types.len(), *current),
        }
    }

    pub fn reset(&mut self) {
        match self {
            Belief::Posterior { posterior, .. } => posterior.reset(),
            Belief::Oracle { current, .. } => *current = 0,
        }
    }

    /// Folds in the action `player` took at time `tau` of `history`.
    pub fn observe(&mut self, history: &History<S>, tau: usize, player: usize) {
        if let Belief::Posterior { types, posterior } = self {
            let a = history.played(tau, player);
            let probs: Vec<F> = types.iter().map(|ty| ty.policy(history, tau, player)[a]).collect();
            posterior.observe(&probs);
        }
    }

    pub fn as_posterior(&self) -> Option<&Posterior<F>> {
        match self {
            Belief::Posterior { posterior, .. } => Some(posterior),
            Belief::Oracle { .. } => None,
        }
    }
}

/// Opponent model of an Algorithm-2 agent.
pub enum Learner<S, F: Real> {
    /// Posterior-weighted types, one belief per player (`None` for self).
    Hba { beliefs: Vec<Option<Belief<S, F>>> },
    /// Marginal action frequencies per state.
    Jal,
    /// Action frequencies per state, conditioned on the own action.
    Cjal,
    /// Policy hill climbing on an own-action Q-table; marginal frequencies
    /// drive the simulated opponents.
    Wolf,
}

/// Per-opponent predictions at one step, indexed by own action when the
/// model is conditional.
struct Prediction<F> {
    per_own: Vec<Vec<Vec<F>>>,
}

impl<F: Real> Prediction<F> {
    fn get(&self, own: usize) -> &[Vec<F>] {
        if self.per_own.len() == 1 {
            &self.per_own[0]
        } else {
            &self.per_own[own]
        }
    }
}

/// An agent running the reinforcement learning framework.
pub struct RlAgent<S: Clone + Eq + Hash, F: Real> {
    name: String,
    pub params: RlParams,
    learner: Learner<S, F>,
    me: usize,
    actions: Vec<usize>,
    ids: HashMap<S, u32>,
    q: QTable<F>,
    trace: Trace<F>,
    freq: FrequencyModel<u32>,
    wolf: WolfPolicy<F>,
    projected: Option<History<S>>,
}

impl<S: Clone + Eq + Hash + Send + Sync, F: Real> RlAgent<S, F> {
    pub fn new(name: impl Into<String>, learner: Learner<S, F>, params: RlParams) -> Self {
        let conditional = matches!(learner, Learner::Cjal);
        Self {
            name: name.into(),
            params,
            learner,
            me: 0,
            actions: Vec::new(),
            ids: HashMap::new(),
            q: QTable::new(0),
            trace: Trace::new(),
            freq: FrequencyModel::new(Vec::new(), conditional),
            wolf: WolfPolicy::new(0),
            projected: None,
        }
    }

    pub fn q_table(&self) -> &QTable<F> {
        &self.q
    }

    pub fn frequencies(&self) -> &FrequencyModel<u32> {
        &self.freq
    }

    pub fn wolf_policy(&self) -> &WolfPolicy<F> {
        &self.wolf
    }

    pub fn state_id(&self, s: &S) -> Option<u32> {
        self.ids.get(s).copied()
    }

    pub fn beliefs(&self) -> Option<&[Option<Belief<S, F>>]> {
        match &self.learner {
            Learner::Hba { beliefs } => Some(beliefs),
            _ => None,
        }
    }

    fn intern(&mut self, s: &S) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.ids.len() as u32;
        self.ids.insert(s.clone(), id);
        id
    }

    fn is_wolf(&self) -> bool {
        matches!(self.learner, Learner::Wolf)
    }

    fn joint_key(&self, joint: &[usize]) -> usize {
        if self.is_wolf() {
            return joint[self.me];
        }
        joint
            .iter()
            .enumerate()
            .fold(0, |idx, (p, &a)| idx * self.actions[p] + a)
    }

    fn predict(&self, h: &History<S>, s: u32) -> Prediction<F> {
        let n = self.actions.len();
        let per_player = |own: usize| -> Vec<Vec<F>> {
            (0..n)
                .map(|j| {
                    if j == self.me {
                        return Vec::new();
                    }
                    match &self.learner {
                        Learner::Hba { beliefs } => {
                            let b = beliefs[j].as_ref().expect("belief for every opponent");
                            mixture(b.types(), &b.weights(), h, h.t(), j)
                        }
                        _ => self.freq.predict(&s, j, own),
                    }
                })
                .collect()
        };
        if matches!(self.learner, Learner::Cjal) {
            Prediction {
                per_own: (0..self.actions[self.me]).map(per_player).collect(),
            }
        } else {
            Prediction {
                per_own: vec![per_player(0)],
            }
        }
    }

    fn exp_pay(&self, s: u32, own: usize, pred: &Prediction<F>) -> F {
        if self.is_wolf() {
            return self.q.get(s, own);
        }
        let Some(row) = self.q.row(s) else {
            return F::zero();
        };
        opponent_joints(self.me, own, pred.get(own))
            .into_iter()
            .map(|(joint, p)| p * row[self.joint_key(&joint)])
            .sum()
    }

    fn values(&self, s: u32, pred: &Prediction<F>) -> Vec<F> {
        (0..self.actions[self.me]).map(|a| self.exp_pay(s, a, pred)).collect()
    }

    /// Greedy action set, or the WoLF policy.
    fn greedy(&self, s: u32, pred: &Prediction<F>) -> Vec<F> {
        if self.is_wolf() {
            return self.wolf.policy(s);
        }
        let v = self.values(s, pred);
        dist::uniform_over(v.len(), &dist::argmax_set(&v, F::norm_tolerance()))
    }

    fn with_exploration(&self, greedy: Vec<F>, epsilon: f64) -> Vec<F> {
        if epsilon == 0.0 {
            return greedy;
        }
        let e = F::lit(epsilon);
        let u = F::one() / F::from_usize_lossy(greedy.len());
        greedy.into_iter().map(|p| (F::one() - e) * p + e * u).collect()
    }

    fn update(&mut self, trace: &mut Trace<F>, s: u32, joint: &[usize], u: F, next: Option<(u32, &Prediction<F>)>, t: usize) {
        let next_value = next.map_or(F::zero(), |(s2, pred)| {
            self.values(s2, pred).into_iter().fold(F::neg_infinity(), F::max)
        });
        let a = self.joint_key(joint);
        trace.update(&mut self.q, s, a, u, next_value, &self.params);
        if self.is_wolf() {
            let row: Vec<F> = (0..self.actions[self.me]).map(|b| self.q.get(s, b)).collect();
            self.wolf.step(s, &row, t);
        }
    }

    fn expand<G: GameModel<F, State = S>>(&mut self, game: &G, h: &mut History<S>, rng: &mut StreamRng) {
        let real_t = h.t();
        let mut trace = self.trace.clone();
        let mut s = self.intern(h.current());
        let mut pred = self.predict(h, s);
        for _ in 0..self.params.depth {
            if game.is_terminal(h.current()) {
                break;
            }
            let own_dist = self.with_exploration(self.greedy(s, &pred), self.params.epsilon_sim);
            let own = dist::sample_index(&own_dist, rng);
            let mut joint = vec![0; self.actions.len()];
            for (j, p) in pred.get(own).iter().enumerate() {
                joint[j] = if j == self.me { own } else { dist::sample_index(p, rng) };
            }
            let state = h.current().clone();
            let u = game.payoffs(&state, &joint)[self.me];
            let next = game.sample_transition(&state, &joint, rng);
            let terminal = game.is_terminal(&next);
            h.push(joint.clone(), next);
            let s2 = self.intern(h.current());
            let pred2 = self.predict(h, s2);
            let target = (!terminal).then_some((s2, &pred2));
            self.update(&mut trace, s, &joint, u, target, real_t);
            s = s2;
            pred = pred2;
        }
        h.truncate(real_t);
    }
}

impl<F: Real, G: GameModel<F>> Controller<F, G> for RlAgent<G::State, F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn begin_episode(&mut self, game: &G, player: usize) {
        self.me = player;
        self.actions = (0..game.num_players()).map(|p| game.num_actions(p)).collect();
        let width = if self.is_wolf() {
            self.actions[player]
        } else {
            self.actions.iter().product()
        };
        self.ids.clear();
        self.q = QTable::new(width);
        self.trace.clear();
        self.freq = FrequencyModel::new(self.actions.clone(), self.freq.is_conditional());
        self.wolf = WolfPolicy::new(self.actions[player]);
        self.projected = None;
        if let Learner::Hba { beliefs } = &mut self.learner {
            for b in beliefs.iter_mut().flatten() {
                b.reset();
            }
        }
    }

    fn act(&mut self, ctx: &StepContext<'_, F, G>, _rng: &mut StreamRng) -> Vec<F> {
        if let Learner::Hba { beliefs } = &mut self.learner {
            for (j, b) in beliefs.iter_mut().enumerate() {
                if let Some(Belief::Oracle { current, .. }) = b {
                    *current = ctx.oracle_joint_type()[j];
                }
            }
        }
        let s = self.intern(ctx.history.current());
        let pred = self.predict(ctx.history, s);
        self.with_exploration(self.greedy(s, &pred), self.params.epsilon_real)
    }

    fn observe(&mut self, ctx: &StepContext<'_, F, G>, payoffs: &[F], rng: &mut StreamRng) {
        let h = ctx.history;
        let t = h.t();
        let prev = t - 1;
        if let Learner::Hba { beliefs } = &mut self.learner {
            for (j, b) in beliefs.iter_mut().enumerate() {
                if let Some(b) = b {
                    b.observe(h, prev, j);
                }
            }
        }
        let s = self.intern(h.state(prev));
        let joint = h.action(prev).clone();
        self.freq.observe(&s, self.me, &joint);

        let mut projected = match self.projected.take() {
            Some(mut p) if p.t() == prev => {
                p.push(joint.clone(), h.current().clone());
                p
            }
            _ => h.clone(),
        };
        let s2 = self.intern(h.current());
        let terminal = ctx.game.is_terminal(h.current());
        let pred2 = self.predict(&projected, s2);
        let mut trace = std::mem::take(&mut self.trace);
        self.update(&mut trace, s, &joint, payoffs[self.me], (!terminal).then_some((s2, &pred2)), prev);
        self.trace = trace;
        if !terminal {
            for _ in 0..self.params.expansions {
                self.expand(ctx.game, &mut projected, rng);
            }
        }
        self.projected = Some(projected);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_update_matches_hand_computation() {
        let p = RlParams::default();
        let mut q = QTable::<f64>::new(4);
        let mut e = Trace::new();
        let delta = e.update(&mut q, 0, 1, 1.0, 0.0, &p);
        assert!((delta - 0.2).abs() < 1e-12);
        assert!((q.get(0, 1) - 0.2).abs() < 1e-12);
        assert!((e.get(0, 1) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn second_update_credits_first_pair_through_trace() {
        let p = RlParams::default();
        let mut q = QTable::<f64>::new(4);
        let mut e = Trace::new();
        e.update(&mut q, 0, 0, 0.0, 0.0, &p);
        let delta = e.update(&mut q, 1, 0, 1.0, 0.0, &p);
        assert!((q.get(0, 0) - delta * 0.9).abs() < 1e-12);
        assert!((q.get(1, 0) - delta).abs() < 1e-12);
    }

    #[test]
    fn zero_delta_only_decays() {
        let p = RlParams::default();
        let mut q = QTable::<f64>::new(2);
        let mut e = Trace::new();
        e.update(&mut q, 0, 0, 0.0, 0.0, &p);
        let before = q.clone();
        e.update(&mut q, 0, 1, 0.0, 0.0, &p);
        assert_eq!(q.get(0, 0), before.get(0, 0));
        assert!((e.get(0, 0) - 0.81).abs() < 1e-12);
    }

    #[test]
    fn traces_below_cutoff_are_dropped() {
        let p = RlParams::default();
        let mut q = QTable::<f64>::new(1);
        let mut e = Trace::new();
        for s in 0..100 {
            e.update(&mut q, s, 0, 0.0, 0.0, &p);
        }
        assert!(e.len() <= 45);
    }

    #[test]
    fn frequency_models() {
        let mut jal = FrequencyModel::<u32>::new(vec![5, 5], false);
        for a in [0, 0, 0, 1] {
            jal.observe(&7, 0, &[4, a]);
        }
        let p: Vec<f64> = jal.predict(&7, 1, 0);
        assert_eq!(p, vec![0.75, 0.25, 0.0, 0.0, 0.0]);
        let unseen: Vec<f64> = jal.predict(&8, 1, 0);
        assert_eq!(unseen, vec![0.2; 5]);

        let mut cjal = FrequencyModel::<u32>::new(vec![5, 5], true);
        cjal.observe(&7, 0, &[4, 0]);
        cjal.observe(&7, 0, &[0, 1]);
        assert_eq!(cjal.predict::<f64>(&7, 1, 4), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(cjal.predict::<f64>(&7, 1, 0), vec![0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn wolf_rates() {
        assert!((wolf_rate::<f64>(0) - 0.001).abs() < 1e-15);
    }

    #[test]
    fn wolf_losing_step_moves_mass_to_argmax() {
        let mut w = WolfPolicy::<f64>::new(2);
        w.step(0, &[1.0, 0.0], 0);
        let pi = w.policy(0);
        assert!((pi[0] - 0.502).abs() < 1e-12 && (pi[1] - 0.498).abs() < 1e-12);
    }

    #[test]
    fn wolf_point_mass_stays() {
        let mut w = WolfPolicy::<f64>::new(2);
        for _ in 0..2000 {
            w.step(0, &[1.0, 0.0], 0);
        }
        let pi = w.policy(0);
        assert_eq!(pi, vec![1.0, 0.0]);
        w.step(0, &[1.0, 0.0], 0);
        assert_eq!(w.policy(0), vec![1.0, 0.0]);
    }
}
