use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use hba_core::behavior::BehaviorType;
use hba_core::rng::StreamRng;
use hba_core::sbg::{Controller, GameModel, History, StepContext};
use rand::Rng;

/// Payoff table `[a0][a1] -> [u0, u1]`.
pub type Table = Vec<Vec<[f64; 2]>>;

pub fn random_table(rng: &mut StreamRng, n0: usize, n1: usize) -> Table {
    (0..n0)
        .map(|_| (0..n1).map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect())
        .collect()
}

/// A random distribution with some exact zeros.
pub fn random_dist(rng: &mut StreamRng, n: usize) -> Vec<f64> {
    loop {
        let mut p: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random_range(0.05..1.0) })
            .collect();
        let s: f64 = p.iter().sum();
        if s > 0.0 {
            p.iter_mut().for_each(|x| *x /= s);
            return p;
        }
    }
}

/// A behaviour that looks up its action distribution by round and the
/// previous joint action.
#[derive(Debug, Clone)]
pub struct TableType {
    pub name: String,
    /// `[t][context]`, context 0 at `t = 0`, else `1 + a0 * n1 + a1`.
    pub table: Vec<Vec<Vec<f64>>>,
    pub n1: usize,
}

impl TableType {
    pub fn random(rng: &mut StreamRng, name: &str, rounds: usize, own: usize, n0: usize, n1: usize) -> Self {
        let contexts = 1 + n0 * n1;
        Self {
            name: name.into(),
            table: (0..rounds)
                .map(|_| (0..contexts).map(|_| random_dist(rng, own)).collect())
                .collect(),
            n1,
        }
    }

    fn context(&self, last: Option<&[usize]>) -> usize {
        last.map_or(0, |j| 1 + j[0] * self.n1 + j[1])
    }

    /// The distribution after the joint-action sequence `seq`.
    pub fn lookup(&self, seq: &[(usize, usize)]) -> Vec<f64> {
        let last = seq.last().map(|&(a, b)| [a, b]);
        self.table[seq.len()][self.context(last.as_ref().map(|x| &x[..]))].clone()
    }
}

impl BehaviorType<usize, f64> for TableType {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn policy(&self, history: &History<usize>, t: usize, _player: usize) -> Vec<f64> {
        let last = (t > 0).then(|| history.action(t - 1).as_slice());
        self.table[t][self.context(last)].clone()
    }

    fn summary(&self, history: &History<usize>, t: usize, _player: usize) -> Option<u128> {
        let last = (t > 0).then(|| history.action(t - 1).as_slice());
        Some(((t as u128) << 32) | self.context(last) as u128)
    }
}

/// Opponent prediction after a joint-action sequence, as pairs `(a0, a1)`.
pub type Predict<'a> = dyn Fn(&[(usize, usize)]) -> Vec<f64> + 'a;

fn joint(me: usize, own: usize, other: usize) -> (usize, usize) {
    if me == 0 {
        (own, other)
    } else {
        (other, own)
    }
}

fn pay(table: &Table, me: usize, j: (usize, usize)) -> f64 {
    table[j.0][j.1][me]
}

/// Discounted expectimax over own actions with the opponent fixed by
/// `predict`, `depth` further steps, stopping at round `rounds`.
pub fn expectimax(
    table: &Table,
    me: usize,
    predict: &Predict<'_>,
    seq: &mut Vec<(usize, usize)>,
    rounds: usize,
    depth: usize,
    gamma: f64,
) -> Vec<f64> {
    let own_n = if me == 0 { table.len() } else { table[0].len() };
    let p = predict(seq);
    (0..own_n)
        .map(|own| {
            let mut v = 0.0;
            for (b, &pb) in p.iter().enumerate() {
                let j = joint(me, own, b);
                let mut q = pay(table, me, j);
                if depth > 0 && seq.len() + 1 < rounds {
                    seq.push(j);
                    let next = expectimax(table, me, predict, seq, rounds, depth - 1, gamma);
                    seq.pop();
                    q += gamma * next.into_iter().fold(f64::NEG_INFINITY, f64::max);
                }
                v += pb * q;
            }
            v
        })
        .collect()
}

/// Sum over every trajectory of `steps` rounds that starts with `first`:
/// opponent-path probability times payoff sum, own later actions
/// enumerated without weights.
pub fn trajectory_sum(
    table: &Table,
    me: usize,
    predict: &Predict<'_>,
    seq: &mut Vec<(usize, usize)>,
    first: Option<usize>,
    steps: usize,
) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn walk(
        table: &Table,
        me: usize,
        predict: &Predict<'_>,
        seq: &mut Vec<(usize, usize)>,
        first: Option<usize>,
        steps: usize,
        prob: f64,
        acc: f64,
        out: &mut f64,
    ) {
        if steps == 0 {
            *out += prob * acc;
            return;
        }
        let own_n = if me == 0 { table.len() } else { table[0].len() };
        let owns: Vec<usize> = match first {
            Some(a) => vec![a],
            None => (0..own_n).collect(),
        };
        let p = predict(seq);
        for own in owns {
            for (b, &pb) in p.iter().enumerate() {
                if pb == 0.0 {
                    continue;
                }
                let j = joint(me, own, b);
                seq.push(j);
                walk(table, me, predict, seq, None, steps - 1, prob * pb, acc + pay(table, me, j), out);
                seq.pop();
            }
        }
    }
    let mut out = 0.0;
    walk(table, me, predict, seq, first, steps, 1.0, 0.0, &mut out);
    out
}

/// Values of every first action under the finite-horizon trajectory rule:
/// `min(horizon, rounds - t)` rounds are enumerated.
pub fn trajectory_values(
    table: &Table,
    me: usize,
    predict: &Predict<'_>,
    prefix: &[(usize, usize)],
    rounds: usize,
    horizon: usize,
) -> Vec<f64> {
    let own_n = if me == 0 { table.len() } else { table[0].len() };
    let steps = horizon.min(rounds - prefix.len()).max(1);
    (0..own_n)
        .map(|a| trajectory_sum(table, me, predict, &mut prefix.to_vec(), Some(a), steps))
        .collect()
}

pub fn history_of(seq: &[(usize, usize)]) -> History<usize> {
    let mut h = History::new(0usize);
    for (t, &(a, b)) in seq.iter().enumerate() {
        h.push(vec![a, b], t + 1);
    }
    h
}

/// A controller shared with the test so its state can be inspected after
/// an episode.
pub struct Shared<C>(pub Arc<Mutex<C>>);

impl<C> Shared<C> {
    pub fn new(c: C) -> (Self, Arc<Mutex<C>>) {
        let a = Arc::new(Mutex::new(c));
        (Self(a.clone()), a)
    }
}

impl<G: GameModel<f64>, C: Controller<f64, G>> Controller<f64, G> for Shared<C> {
    fn name(&self) -> String {
        self.0.lock().unwrap().name()
    }

    fn begin_episode(&mut self, game: &G, player: usize) {
        self.0.lock().unwrap().begin_episode(game, player)
    }

    fn act(&mut self, ctx: &StepContext<'_, f64, G>, rng: &mut StreamRng) -> Vec<f64> {
        self.0.lock().unwrap().act(ctx, rng)
    }

    fn observe(&mut self, ctx: &StepContext<'_, f64, G>, payoffs: &[f64], rng: &mut StreamRng) {
        self.0.lock().unwrap().observe(ctx, payoffs, rng)
    }
}

/// Action counts of every other player per `(context, own action slot)`.
pub fn count_oracle<K: Hash + Eq + Clone>(
    steps: &[(K, Vec<usize>)],
    me: usize,
    conditional: bool,
    actions: &[usize],
) -> HashMap<(K, usize, usize), Vec<u32>> {
    let mut out: HashMap<(K, usize, usize), Vec<u32>> = HashMap::new();
    for (key, joint) in steps {
        let slot = if conditional { joint[me] } else { 0 };
        for (j, &a) in joint.iter().enumerate() {
            if j != me {
                out.entry((key.clone(), slot, j)).or_insert_with(|| vec![0; actions[j]])[a] += 1;
            }
        }
    }
    out
}

/// Avoid-your-own-recent-actions policy with look-back `h` (RPS, three
/// actions), from the definition: weight `x - sum (x + 1 - tau)` over the
/// last `x = min(t, h)` rounds where the action was played, clipped at 0.
pub fn i_focused(own_past: &[usize], h: usize) -> [f64; 3] {
    let t = own_past.len();
    let x = t.min(h);
    let mut g = [x as f64; 3];
    for tau in 1..=x {
        g[own_past[t - tau]] -= (x + 1 - tau) as f64;
    }
    let g = g.map(|v| v.max(0.0));
    let s: f64 = g.iter().sum();
    if s > 0.0 {
        g.map(|v| v / s)
    } else {
        [1.0 / 3.0; 3]
    }
}

/// RPS outcome for the first player: 1 win, 0 draw, -1 loss. Actions are
/// rock 0, paper 1, scissors 2.
pub fn rps_outcome(a: usize, b: usize) -> i32 {
    match (3 + a - b) % 3 {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Win rate and mean payoff of an agent that knows the opponent is
/// i-focused(`h`) and maximises expected payoff each round, breaking exact
/// ties uniformly.
pub fn rps_best_response(h: usize, rounds: usize, rng: &mut StreamRng) -> (f64, f64) {
    let mut opp_past = Vec::new();
    let mut wins = 0;
    let mut payoff = 0;
    for _ in 0..rounds {
        let p = i_focused(&opp_past, h);
        let ev: Vec<f64> = (0..3)
            .map(|a| (0..3).map(|b| p[b] * rps_outcome(a, b) as f64).sum())
            .collect();
        let best = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = (0..3).filter(|&a| (ev[a] - best).abs() < 1e-12).collect();
        let a = ties[rng.random_range(0..ties.len())];
        let r: f64 = rng.random();
        let b = if r < p[0] {
            0
        } else if r < p[0] + p[1] {
            1
        } else {
            2
        };
        if rps_outcome(a, b) == 1 {
            wins += 1;
        }
        payoff += rps_outcome(a, b);
        opp_past.push(b);
    }
    (wins as f64 / rounds as f64, payoff as f64 / rounds as f64)
}

/// Best and worst totals over all own PD action sequences of `rounds`
/// rounds against tit-for-tat (C = 0, D = 1).
pub fn pd_tit_for_tat_extremes(rounds: usize) -> (f64, f64) {
    let pay = |a: usize, b: usize| -> f64 {
        match (a, b) {
            (0, 0) => 3.0,
            (0, 1) => 0.0,
            (1, 0) => 5.0,
            _ => 1.0,
        }
    };
    let mut best = f64::NEG_INFINITY;
    let mut worst = f64::INFINITY;
    for mask in 0u32..(1 << rounds) {
        let mut total = 0.0;
        let mut theirs = 0;
        for t in 0..rounds {
            let mine = ((mask >> t) & 1) as usize;
            total += pay(mine, theirs);
            theirs = mine;
        }
        best = best.max(total);
        worst = worst.min(total);
    }
    (best, worst)
}

/// Total of always-defect against tit-for-tat.
pub fn pd_always_defect_vs_tit_for_tat(rounds: usize) -> f64 {
    5.0 + (rounds as f64 - 1.0)
}
