//! Parameterised experiments behind the integration tests and the
//! acceptance suite.

use std::sync::Arc;
use std::time::{Duration, Instant};

use hba_core::behavior::{build_foraging_space, BehaviorController, SharedType, TypeSpec, UniformType};
use hba_core::eval::{
    estimate_with, AgentSpec, DistributionSet, EpisodeContext, EpisodeRecord, EpisodeSetup, EstimateSettings,
    ExperimentConfig, ExperimentResult,
};
use hba_core::foraging::{generate_initial_state, ForagingGame, ForagingSpec, ForagingState, Move, NUM_ACTIONS, STEP_COST};
use hba_core::matrix::{artificial_state, MatrixGame, MatrixKind, RepeatedGame};
use hba_core::matrix_agent::{repeated, MatrixAgent, MatrixAgentKind};
use hba_core::planner::{ExactPlanner, HbaValue, OpponentModel, TypeBelief, TypeMixture};
use hba_core::posterior::{LikelihoodMode, Posterior, TimeWeight};
use hba_core::rl::{Belief, Learner, RlAgent, RlParams, WolfPolicy};
use hba_core::rng::{self, derive_seed, stream, StreamRng};
use hba_core::sbg::{run_episode, Controller, EpisodePath, GameModel, History, PlayerTypeRule, TypeDistribution, TypedPlayer};
use rand::Rng;

use super::oracles::{self, Shared, TableType};

type Ctrl<G> = Box<dyn Controller<f64, G>>;

// ---------------------------------------------------------------- planning

/// Largest deviations from the brute-force references over random games.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlanningReport {
    pub games: usize,
    pub value_err: f64,
    pub exact_err: f64,
    pub elapsed: Duration,
}

/// Hides the memo key so the planner recomputes every node.
struct NoMemo<'a, M>(&'a M);

impl<M: OpponentModel<usize, f64>> OpponentModel<usize, f64> for NoMemo<'_, M> {
    fn predict(&self, h: &History<usize>, p: usize, own: usize) -> Vec<f64> {
        self.0.predict(h, p, own)
    }
}

/// Random two-player games with up to three actions each, random opponent
/// type mixtures and horizons up to three.
pub fn planner_equivalence(games: usize, seed: u64) -> PlanningReport {
    let start = Instant::now();
    let mut rep = PlanningReport {
        games,
        ..Default::default()
    };
    for g in 0..games {
        let mut r = stream(derive_seed(seed, g as u64), 0);
        let (n0, n1) = (r.random_range(1..=3), r.random_range(1..=3));
        let table = oracles::random_table(&mut r, n0, n1);
        let rounds = r.random_range(1..=6);
        let me = r.random_range(0..2);
        let other_n = if me == 0 { n1 } else { n0 };
        let k = r.random_range(1..=3);
        let types: Vec<TableType> = (0..k)
            .map(|i| TableType::random(&mut r, &format!("T{i}"), rounds, other_n, n0, n1))
            .collect();
        let weights = oracles::random_dist(&mut r, k);
        let t = r.random_range(0..rounds);
        let prefix: Vec<(usize, usize)> = (0..t).map(|_| (r.random_range(0..n0), r.random_range(0..n1))).collect();
        let horizon = r.random_range(1..=3);
        let gamma = r.random_range(0.5..1.0);

        let predict = |seq: &[(usize, usize)]| -> Vec<f64> {
            let mut out = vec![0.0; other_n];
            for (ty, w) in types.iter().zip(&weights) {
                for (o, p) in out.iter_mut().zip(ty.lookup(seq)) {
                    *o += w * p;
                }
            }
            out
        };
        let game = RepeatedGame::new(MatrixGame::custom(table.clone()), rounds);
        let shared: Vec<SharedType<usize, f64>> = types.iter().map(|t| Arc::new(t.clone()) as SharedType<usize, f64>).collect();
        let mut players: Vec<TypeBelief<usize, f64>> = vec![(&[], &[]); 2];
        players[1 - me] = (&shared, &weights);
        let mix = TypeMixture { players };
        let h = oracles::history_of(&prefix);

        let depth = horizon - 1;
        let want = oracles::expectimax(&table, me, &predict, &mut prefix.clone(), rounds, depth, gamma);
        let mut hv = HbaValue::new(&game, me, gamma, 3);
        for got in [hv.values(&h, depth, &mix).unwrap(), hv.values(&h, depth, &NoMemo(&mix)).unwrap()] {
            for (a, b) in got.iter().zip(&want) {
                rep.value_err = rep.value_err.max((a - b).abs());
            }
        }

        let want = oracles::trajectory_values(&table, me, &predict, &prefix, rounds, horizon);
        let planner = ExactPlanner::new(horizon, rounds);
        for got in [
            planner.action_values(&game, &h, me, &mix).unwrap(),
            planner.action_values(&game, &h, me, &NoMemo(&mix)).unwrap(),
        ] {
            for (a, b) in got.iter().zip(&want) {
                rep.exact_err = rep.exact_err.max((a - b).abs());
            }
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

// ---------------------------------------------------------------- foraging

pub fn desk_spec(size: i32, players: usize, foods: usize) -> ForagingSpec {
    ForagingSpec {
        width: size,
        height: size,
        players,
        foods,
        max_level: None,
    }
}

fn heuristic_space() -> Vec<SharedType<ForagingState, f64>> {
    build_foraging_space(&TypeSpec::heuristics(None)).unwrap()
}

/// Outcome of the static-type convergence check.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceReport {
    /// Argmax set equals the set of types that predicted exactly like the
    /// true type on every observed step.
    pub hits: usize,
    /// Argmax is the true type alone.
    pub unique: usize,
    /// Episodes where some type was observationally equivalent to the
    /// true one.
    pub ambiguous: usize,
    pub episodes: usize,
    pub elapsed: Duration,
}

impl ConvergenceReport {
    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.episodes as f64
    }
}

/// HBA with a product posterior over H1-H4 against a fixed heuristic,
/// inspected after `steps` steps or at the end of a shorter episode.
pub fn posterior_convergence(episodes: usize, steps: usize, seed: u64) -> ConvergenceReport {
    let start = Instant::now();
    let spec = desk_spec(8, 2, 5);
    let space = heuristic_space();
    let (mut hits, mut unique, mut ambiguous) = (0, 0, 0);
    for k in 0..episodes {
        let s = derive_seed(seed, k as u64);
        let truth = k % 4;
        let s0 = generate_initial_state(&mut stream(s, rng::INIT_STREAM), &spec).unwrap();
        let game = ForagingGame::<f64>::new(s0);
        let agent = RlAgent::new(
            "Unl",
            Learner::Hba {
                beliefs: vec![None, Some(Belief::posterior(space.clone(), LikelihoodMode::Product))],
            },
            RlParams::default(),
        );
        let (ctrl, handle) = Shared::new(agent);
        let mut ctrls: Vec<Ctrl<ForagingGame<f64>>> =
            vec![Box::new(ctrl), Box::new(BehaviorController::new(space[truth].clone()))];
        let mut sched = TypeDistribution::fixed(&[0, 0]).instantiate(stream(s, rng::SCHEDULE_STREAM));
        let path = run_episode(&game, &mut sched, &mut ctrls, steps, s).unwrap();
        let h = &path.history;
        let class: Vec<usize> = (0..space.len())
            .filter(|&j| {
                (0..path.len()).all(|tau| {
                    let (p, q) = (space[j].policy(h, tau, 1), space[truth].policy(h, tau, 1));
                    p.iter().zip(&q).all(|(x, y): (&f64, &f64)| (x - y).abs() < 1e-12)
                })
            })
            .collect();
        let agent = handle.lock().unwrap();
        let post = agent.beliefs().unwrap()[1].as_ref().unwrap().as_posterior().unwrap();
        let argmax = post.argmax();
        hits += (argmax == class) as usize;
        unique += (argmax == vec![truth]) as usize;
        ambiguous += (class.len() > 1) as usize;
    }
    ConvergenceReport {
        hits,
        unique,
        ambiguous,
        episodes,
        elapsed: start.elapsed(),
    }
}

/// Outcome of the scripted switch-and-return scenario.
#[derive(Debug, Clone, Copy, Default)]
pub struct SwitchReport {
    pub runs: usize,
    pub tried: usize,
    /// Runs where the product posterior kept the returned type at zero to
    /// the end.
    pub product_zero_forever: usize,
    /// Runs where the reweighted posterior's argmax was exactly the returned
    /// type within `window` steps of the return.
    pub recovered: usize,
}

/// Foraging variant of [`switch_recovery`] over H1-H4. Heuristics often
/// predict identical moves for many steps, which caps how often any
/// posterior can single out the returning type.
pub fn switch_recovery_foraging(runs: usize, phase: usize, window: usize, weight: TimeWeight, seed: u64) -> SwitchReport {
    let spec = desk_spec(8, 2, 5);
    let space = heuristic_space();
    let labels: Vec<String> = space.iter().map(|t| t.name()).collect();
    let mut rep = SwitchReport::default();
    let mut k = 0u64;
    while rep.runs < runs && rep.tried < 50 * runs {
        let s = derive_seed(seed, k);
        k += 1;
        rep.tried += 1;
        let mut r = stream(s, 0);
        let x = r.random_range(0..4);
        let y = (x + r.random_range(1..4)) % 4;
        let s0 = generate_initial_state(&mut stream(s, rng::INIT_STREAM), &spec).unwrap();
        let game = ForagingGame::<f64>::new(s0);
        let opponent: Ctrl<ForagingGame<f64>> = Box::new(TypedPlayer::new(vec![
            Box::new(BehaviorController::new(space[x].clone())),
            Box::new(BehaviorController::new(space[y].clone())),
        ]));
        let uniform: SharedType<ForagingState, f64> = Arc::new(UniformType {
            actions: Move::ALL.len(),
        });
        let mut ctrls: Vec<Ctrl<ForagingGame<f64>>> = vec![Box::new(BehaviorController::new(uniform)), opponent];
        let t_end = 2 * phase + window;
        let dist = TypeDistribution::new(vec![
            PlayerTypeRule::Fixed { index: 0 },
            PlayerTypeRule::Switching {
                candidates: vec![0, 1],
                min_interval: phase,
                max_interval: phase,
            },
        ]);
        let mut sched = dist.instantiate(stream(s, rng::SCHEDULE_STREAM));
        // Two candidates alternate, so the first type is also the returning one.
        let first = sched.clone().sample(0, &mut stream(0, 0))[1];
        let a = if first == 0 { x } else { y };
        let path = run_episode(&game, &mut sched, &mut ctrls, t_end, s).unwrap();
        if path.len() < t_end {
            continue;
        }
        let h = &path.history;
        let mut product = Posterior::<f64>::uniform(labels.clone(), LikelihoodMode::Product);
        let mut tr = Posterior::<f64>::uniform(labels.clone(), LikelihoodMode::Reweighted { weight });
        let mut contradicted = false;
        let mut zero_after_return = true;
        let mut recovered = false;
        for tau in 0..t_end {
            let act = h.played(tau, 1);
            let probs: Vec<f64> = space.iter().map(|ty| ty.policy(h, tau, 1)[act]).collect();
            product.observe(&probs);
            tr.observe(&probs);
            let now = tau + 1;
            if (phase..2 * phase).contains(&tau) && product.probabilities()[a] == 0.0 {
                contradicted = true;
            }
            if now > 2 * phase {
                zero_after_return &= product.likelihood(a) == 0.0
                    && (product.is_degenerate() || product.probabilities()[a] == 0.0);

                if now <= 2 * phase + window && tr.argmax() == vec![a] {
                    recovered = true;
                }
            }
        }
        if !contradicted {
            continue;
        }
        rep.runs += 1;
        rep.product_zero_forever += zero_after_return as usize;
        rep.recovered += recovered as usize;
    }
    rep
}

/// A history-independent action distribution.
#[derive(Debug, Clone)]
pub struct Leaning {
    pub name: &'static str,
    pub probs: Vec<f64>,
}

impl hba_core::behavior::BehaviorType<usize, f64> for Leaning {
    fn name(&self) -> String {
        self.name.into()
    }
    fn policy(&self, _h: &History<usize>, _t: usize, _player: usize) -> Vec<f64> {
        self.probs.clone()
    }
}

/// Hypotheses for the scripted switch: the two scripted types, whose
/// supports differ, plus two full-support types.
pub fn switch_space() -> Vec<SharedType<usize, f64>> {
    let t = |name, probs: [f64; 3]| Arc::new(Leaning { name, probs: probs.to_vec() }) as SharedType<usize, f64>;
    vec![
        t("rock-leaning", [0.6, 0.4, 0.0]),
        t("scissors-leaning", [0.0, 0.4, 0.6]),
        t("uniform", [1.0 / 3.0; 3]),
        t("paper-leaning", [0.2, 0.6, 0.2]),
    ]
}

/// Repeated rock-paper-scissors where the other player is scripted to play
/// type A for `phase` rounds, then B, then A again. Runs count when some B
/// round contradicted A; seeds where it did not are skipped and counted in
/// `tried`.
pub fn switch_recovery(runs: usize, phase: usize, window: usize, weight: TimeWeight, seed: u64) -> SwitchReport {
    let space = switch_space();
    let labels: Vec<String> = space.iter().map(|t| t.name()).collect();
    let rounds = 2 * phase + window;
    let game = repeated::<f64>(MatrixKind::RockPaperScissors, rounds).unwrap();
    let mut rep = SwitchReport::default();
    let mut k = 0u64;
    while rep.runs < runs && rep.tried < 10 * runs {
        let s = derive_seed(seed, k);
        k += 1;
        rep.tried += 1;
        let me: Ctrl<RepeatedGame<f64>> = Box::new(BehaviorController::new(
            Arc::new(UniformType { actions: 3 }) as SharedType<usize, f64>
        ));
        let other: Ctrl<RepeatedGame<f64>> = Box::new(TypedPlayer::new(
            space[..2].iter().map(|t| Box::new(BehaviorController::new(t.clone())) as Ctrl<RepeatedGame<f64>>).collect(),
        ));
        let mut ctrls = vec![me, other];
        let dist = TypeDistribution::new(vec![
            PlayerTypeRule::Fixed { index: 0 },
            PlayerTypeRule::Switching {
                candidates: vec![0, 1],
                min_interval: phase,
                max_interval: phase,
            },
        ]);
        let mut sched = dist.instantiate(stream(s, rng::SCHEDULE_STREAM));
        // Two candidates alternate, so the first type is also the returning one.
        let a = sched.clone().sample(0, &mut stream(0, 0))[1];
        let path = run_episode(&game, &mut sched, &mut ctrls, rounds, s).unwrap();
        let h = &path.history;
        let mut product = Posterior::<f64>::uniform(labels.clone(), LikelihoodMode::Product);
        let mut tr = Posterior::<f64>::uniform(labels.clone(), LikelihoodMode::Reweighted { weight });
        let mut contradicted = false;
        let mut zero_after_return = true;
        let mut recovered = false;
        for tau in 0..rounds {
            let act = h.played(tau, 1);
            let probs: Vec<f64> = space.iter().map(|ty| ty.policy(h, tau, 1)[act]).collect();
            product.observe(&probs);
            tr.observe(&probs);
            let now = tau + 1;
            if (phase..2 * phase).contains(&tau) && product.likelihood(a) == 0.0 {
                contradicted = true;
            }
            if now > 2 * phase {
                zero_after_return &= product.likelihood(a) == 0.0
                    && (product.is_degenerate() || product.probabilities()[a] == 0.0);
                recovered |= tr.argmax() == vec![a];
            }
        }
        if !contradicted {
            continue;
        }
        rep.runs += 1;
        rep.product_zero_forever += zero_after_return as usize;
        rep.recovered += recovered as usize;
    }
    rep
}

/// Statistics of the random-action foraging fuzz.
#[derive(Debug, Clone, Copy, Default)]
pub struct FuzzReport {
    pub steps: usize,
    pub episodes: usize,
    pub foods_collected: usize,
}

/// Random joint actions on random problems, checking after every step that
/// entities never share a cell, foods only disappear and keep their
/// position and level, players move at most one cell in the chosen
/// direction, and every payoff is the step cost or the level of a food the
/// player helped load.
pub fn foraging_fuzz(steps: usize, seed: u64) -> Result<FuzzReport, String> {
    let mut r = stream(seed, 0);
    let mut rep = FuzzReport::default();
    while rep.steps < steps {
        let size = r.random_range(5..=10);
        let players = r.random_range(1..=4);
        let foods = r.random_range(1..=4);
        let spec = desk_spec(size, players, foods);
        let Ok(s0) = generate_initial_state(&mut r, &spec) else {
            continue;
        };
        rep.episodes += 1;
        let game = ForagingGame::<f64>::new(s0.clone());
        let mut s = s0;
        s.check_invariants()?;
        for _ in 0..500 {
            if game.is_terminal(&s) || rep.steps >= steps {
                break;
            }
            let joint: Vec<usize> = (0..players).map(|_| r.random_range(0..Move::ALL.len())).collect();
            let u = game.payoffs(&s, &joint);
            let next = game.sample_transition(&s, &joint, &mut r);
            rep.steps += 1;
            next.check_invariants().map_err(|e| format!("step {}: {e}", rep.steps))?;
            let mut removed = Vec::new();
            for (k, (f, g)) in s.foods.iter().zip(&next.foods).enumerate() {
                if f.pos != g.pos || f.level != g.level || (!f.present && g.present) {
                    return Err(format!("food {k} changed other than by removal"));
                }
                if f.present && !g.present {
                    removed.push(k);
                }
            }
            rep.foods_collected += removed.len();
            for (i, (p, q)) in s.players.iter().zip(&next.players).enumerate() {
                let m = Move::from_index(joint[i]);
                if q.pos != p.pos && q.pos != p.pos.offset(m) {
                    return Err(format!("player {i} moved from {:?} to {:?} with {m:?}", p.pos, q.pos));
                }
                if m == Move::Load && q.pos != p.pos {
                    return Err(format!("loading player {i} moved"));
                }
                if u[i] == STEP_COST {
                    continue;
                }
                let credited = removed.iter().any(|&k| {
                    s.foods[k].level as f64 == u[i] && p.pos.is_adjacent(s.foods[k].pos) && m == Move::Load
                });
                if !credited {
                    return Err(format!("player {i} paid {} without loading a removed food", u[i]));
                }
            }
            for &k in &removed {
                let f = s.foods[k];
                let group: Vec<usize> = (0..players)
                    .filter(|&i| u[i] == f.level as f64 && joint[i] == Move::Load.index() && s.players[i].pos.is_adjacent(f.pos))
                    .collect();
                let total: u32 = group.iter().map(|&i| s.players[i].level).sum();
                if group.is_empty() || total < f.level {
                    return Err(format!("food {k} (level {}) removed by loaders of total level {total}", f.level));
                }
            }
            s = next;
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------- matches

/// Player 0's results over several seeded matches.
#[derive(Debug, Clone, Default)]
pub struct MatchStats {
    pub win_rate: f64,
    pub mean_payoff: f64,
    pub per_match: Vec<f64>,
}

pub fn rps_win_rate(
    agent: impl Fn(&RepeatedGame<f64>) -> Ctrl<RepeatedGame<f64>>,
    opponent: impl Fn(&RepeatedGame<f64>) -> Ctrl<RepeatedGame<f64>>,
    matches: usize,
    rounds: usize,
    seed: u64,
) -> MatchStats {
    let game = repeated::<f64>(MatrixKind::RockPaperScissors, rounds).unwrap();
    let mut stats = MatchStats::default();
    for m in 0..matches {
        let s = derive_seed(seed, m as u64);
        let mut ctrls = vec![agent(&game), opponent(&game)];
        let mut sched = TypeDistribution::fixed(&[0, 0]).instantiate(stream(s, rng::SCHEDULE_STREAM));
        let path = run_episode(&game, &mut sched, &mut ctrls, rounds, s).unwrap();
        let rate = path.payoffs.iter().filter(|u| u[0] > 0.0).count() as f64 / path.len() as f64;
        stats.per_match.push(rate);
        stats.mean_payoff += path.total_payoff(0) / (path.len() * matches) as f64;
    }
    stats.win_rate = stats.per_match.iter().sum::<f64>() / matches as f64;
    stats
}

pub fn hba_rps(mode: LikelihoodMode) -> impl Fn(&RepeatedGame<f64>) -> Ctrl<RepeatedGame<f64>> {
    move |g| Box::new(MatrixAgent::hba(g, 0, &TypeSpec::rps_table(), mode, 1).unwrap())
}

pub fn typed(spec: TypeSpec) -> impl Fn(&RepeatedGame<f64>) -> Ctrl<RepeatedGame<f64>> {
    move |g| Box::new(BehaviorController::new(spec.build_matrix(&g.stage).unwrap()))
}

/// Total of the protocol HBA agent against tit-for-tat over 20 rounds, and
/// the agent's actions.
pub fn pd_hba_vs_tit_for_tat(seed: u64) -> (f64, Vec<usize>) {
    let game = repeated::<f64>(MatrixKind::PrisonersDilemma, 20).unwrap();
    let agent = MatrixAgent::protocol(&game, 0, MatrixAgentKind::Hba).unwrap();
    let mut ctrls: Vec<Ctrl<RepeatedGame<f64>>> = vec![Box::new(agent), typed(TypeSpec::TitForTat)(&game)];
    let mut sched = TypeDistribution::fixed(&[0, 0]).instantiate(stream(seed, rng::SCHEDULE_STREAM));
    let path = run_episode(&game, &mut sched, &mut ctrls, 20, seed).unwrap();
    (path.total_payoff(0), (0..path.len()).map(|t| path.history.played(t, 0)).collect())
}

// ---------------------------------------------------------------- estimator

/// One step from the start: payoff 2, then termination with probability
/// 0.3 or an endless non-terminal tail with payoff 0.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticGame {
    pub terminate: f64,
    pub payoff: f64,
}

impl GameModel<f64> for AnalyticGame {
    type State = u8;

    fn domain_id(&self) -> &str {
        "analytic"
    }
    fn num_players(&self) -> usize {
        1
    }
    fn num_actions(&self, _player: usize) -> usize {
        1
    }
    fn initial_state(&self) -> u8 {
        0
    }
    fn is_terminal(&self, s: &u8) -> bool {
        *s == 1
    }
    fn payoffs(&self, s: &u8, _joint: &[usize]) -> Vec<f64> {
        vec![if *s == 0 { self.payoff } else { 0.0 }]
    }
    fn transitions(&self, s: &u8, _joint: &[usize]) -> Vec<(u8, f64)> {
        match s {
            0 => vec![(1, self.terminate), (2, 1.0 - self.terminate)],
            _ => vec![(*s, 1.0)],
        }
    }
    fn state_key(&self, s: &u8) -> String {
        s.to_string()
    }
}

pub fn analytic_estimate(episodes: usize, seed: u64) -> Vec<EpisodeRecord> {
    let settings = EstimateSettings {
        episodes,
        r1: 1.0,
        r2: 1.0,
        t_max: 5,
        seed,
        player: 0,
        distributions: 1,
        workers: 0,
    };
    estimate_with(&settings, |_ctx: EpisodeContext| {
        Ok(EpisodeSetup {
            game: AnalyticGame {
                terminate: 0.3,
                payoff: 2.0,
            },
            schedule: TypeDistribution::fixed(&[0]).instantiate(stream(0, 0)),
            controllers: vec![Box::new(BehaviorController::new(
                Arc::new(UniformType { actions: 1 }) as SharedType<u8, f64>
            )) as Ctrl<AnalyticGame>],
            delta_id: "fixed".into(),
        })
    })
    .unwrap()
}

// ---------------------------------------------------------------- posteriors

/// The switching experiment on a small grid: HBA with a reweighted
/// posterior, HBA with a product posterior and the correct-type reference.
pub fn switching_experiment(size: i32, foods: usize, episodes: usize, t_max: usize, seed: u64) -> ExperimentConfig {
    let heuristics = TypeSpec::heuristics(None);
    ExperimentConfig {
        name: format!("switching-{size}x{size}"),
        description: String::new(),
        domain: desk_spec(size, 2, foods),
        true_types: heuristics.clone(),
        distributions: DistributionSet::Switching {
            min_interval: 10,
            max_interval: 20,
        },
        agents: vec![
            AgentSpec::Hba {
                name: "Gtw".into(),
                types: heuristics.clone(),
                posterior: LikelihoodMode::reweighted(10.0, 0.01, 3.0),
            },
            AgentSpec::Hba {
                name: "Unl".into(),
                types: heuristics,
                posterior: LikelihoodMode::Product,
            },
            AgentSpec::Oracle { name: "Cor".into() },
        ],
        rl: RlParams::default(),
        episodes,
        r1: 1.0,
        r2: 1.0,
        t_max,
        seed,
        player: 0,
        output: None,
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> (ExperimentResult, Duration) {
    let start = Instant::now();
    let r = cfg.run(0).unwrap();
    (r, start.elapsed())
}

pub fn rng_for(seed: u64) -> StreamRng {
    stream(seed, 0)
}

// ---------------------------------------------------------------- baselines

type Agent = RlAgent<ForagingState, f64>;

/// One foraging episode with the learner as player 1 between two
/// heuristics; returns the learner for inspection.
fn learner_episode(learner: Learner<ForagingState, f64>, seed: u64) -> (Agent, EpisodePath<ForagingState, f64>) {
    let spec = desk_spec(6, 3, 3);
    let s0 = generate_initial_state(&mut stream(seed, rng::INIT_STREAM), &spec).unwrap();
    let game = ForagingGame::<f64>::new(s0);
    let space = heuristic_space();
    let params = RlParams {
        expansions: 1,
        depth: 5,
        ..RlParams::default()
    };
    let (agent, handle) = Shared::new(RlAgent::new("learner", learner, params));
    let mut ctrls: Vec<Ctrl<ForagingGame<f64>>> = vec![
        Box::new(BehaviorController::new(space[0].clone())),
        Box::new(agent),
        Box::new(BehaviorController::new(space[3].clone())),
    ];
    let mut sched = TypeDistribution::fixed(&[0, 0, 0]).instantiate(stream(seed, rng::SCHEDULE_STREAM));
    let path = run_episode(&game, &mut sched, &mut ctrls, 60, seed).unwrap();
    drop(ctrls);
    let agent = Arc::try_unwrap(handle).ok().unwrap().into_inner().unwrap();
    (agent, path)
}

pub fn on_simplex(p: &[f64]) -> Result<(), String> {
    let ok = p.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)) && (p.iter().sum::<f64>() - 1.0).abs() < 1e-9;
    if ok {
        Ok(())
    } else {
        Err(format!("{p:?} is not a distribution"))
    }
}

/// Replays the logged steps of several episodes through the count oracle
/// and compares every counter of the learner's frequency model. WoLF-PHC
/// policies at visited states must also be distributions.
pub fn foraging_count_parity(
    learner: fn() -> Learner<ForagingState, f64>,
    conditional: bool,
    seed: u64,
) -> Result<(), String> {
    for k in 0..5 {
        let (agent, path) = learner_episode(learner(), derive_seed(seed, k));
        let h = &path.history;
        let steps: Vec<(u32, Vec<usize>)> = (0..path.len())
            .map(|tau| Ok((agent.state_id(h.state(tau)).ok_or("visited state without an id")?, h.action(tau).clone())))
            .collect::<Result<_, String>>()?;
        let oracle = oracles::count_oracle(&steps, 1, conditional, &[NUM_ACTIONS; 3]);
        let total: u32 = oracle.values().flatten().sum();
        if total as usize != 2 * path.len() {
            return Err(format!("oracle counted {total} for {} steps", path.len()));
        }
        let freq = agent.frequencies();
        if freq.is_conditional() != conditional {
            return Err("wrong conditioning".into());
        }
        let mut keys: Vec<u32> = steps.iter().map(|(k, _)| *k).collect();
        keys.sort_unstable();
        keys.dedup();
        for key in keys {
            for own in 0..NUM_ACTIONS {
                for j in [0, 2] {
                    let want = oracle.get(&(key, if conditional { own } else { 0 }, j));
                    let got = freq.counts(&key, j, own);
                    if got != want.map(|v| v.as_slice()) {
                        return Err(format!("state {key} own {own} player {j}: {got:?} vs {want:?}"));
                    }
                }
            }
            on_simplex(&agent.wolf_policy().policy(key))?;
            on_simplex(&agent.wolf_policy().average(key))?;
        }
    }
    Ok(())
}

/// Matrix-game learners keyed on the previous joint action.
pub fn matrix_count_parity(seed: u64) -> Result<(), String> {
    for (kind, conditional, opponent) in [
        (MatrixKind::PrisonersDilemma, false, TypeSpec::TitForTat),
        (MatrixKind::PrisonersDilemma, true, TypeSpec::TitForTat),
        (MatrixKind::RockPaperScissors, false, TypeSpec::rps_table()[0].clone()),
        (MatrixKind::RockPaperScissors, true, TypeSpec::rps_table()[1].clone()),
    ] {
        let game = repeated::<f64>(kind, 20).unwrap();
        let (agent, handle) = Shared::new(MatrixAgent::learner(&game, 0, conditional, 3));
        let mut ctrls: Vec<Ctrl<RepeatedGame<f64>>> = vec![
            Box::new(agent),
            Box::new(BehaviorController::new(opponent.build_matrix(&game.stage).unwrap())),
        ];
        let mut sched = TypeDistribution::fixed(&[0, 0]).instantiate(stream(seed, rng::SCHEDULE_STREAM));
        let path = run_episode(&game, &mut sched, &mut ctrls, 20, seed).unwrap();
        let h = &path.history;
        let steps: Vec<_> = (0..path.len())
            .map(|tau| (artificial_state(&h.prefix(tau)), h.action(tau).clone()))
            .collect();
        let n = game.stage.num_actions(1);
        let oracle = oracles::count_oracle(&steps, 0, conditional, &[n, n]);
        let agent = handle.lock().unwrap();
        let freq = agent.frequencies().ok_or("learner without frequencies")?;
        for ((key, slot, j), want) in &oracle {
            if freq.counts(key, *j, *slot) != Some(want.as_slice()) {
                return Err(format!("{kind:?} {key:?} own {slot}"));
            }
        }
    }
    Ok(())
}

/// Random hill-climbing steps on random states and action values.
pub fn wolf_random_updates(updates: usize, seed: u64) -> Result<(), String> {
    let mut r = stream(seed, 0);
    let mut wolf = WolfPolicy::<f64>::new(4);
    for t in 0..updates {
        let s = r.random_range(0..5);
        let q: Vec<f64> = (0..4)
            .map(|_| if r.random_bool(0.2) { 1.0 } else { r.random_range(-10.0..10.0) })
            .collect();
        wolf.step(s, &q, t);
        on_simplex(&wolf.policy(s)).map_err(|e| format!("update {t}: {e}"))?;
        on_simplex(&wolf.average(s)).map_err(|e| format!("update {t}: {e}"))?;
    }
    Ok(())
}
