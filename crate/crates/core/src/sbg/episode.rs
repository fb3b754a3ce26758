use serde::{Deserialize, Serialize};

use crate::dist;
use crate::rng::{self, StreamRng};
use crate::scalar::Real;

use super::{GameModel, History, JointAction, JointType, SbgError, TypeSchedule};

/// What a controller sees when it is asked to act or to observe.
pub struct StepContext<'a, F: Real, G: GameModel<F>> {
    pub game: &'a G,
    pub history: &'a History<G::State>,
    pub player: usize,
    /// The player's own type at the current step.
    pub own_type: usize,
    joint_type: &'a [usize],
    _f: std::marker::PhantomData<F>,
}

impl<'a, F: Real, G: GameModel<F>> StepContext<'a, F, G> {
    pub fn new(game: &'a G, history: &'a History<G::State>, player: usize, joint_type: &'a [usize]) -> Self {
        Self {
            game,
            history,
            player,
            own_type: joint_type.get(player).copied().unwrap_or(0),
            joint_type,
            _f: std::marker::PhantomData,
        }
    }

    pub fn t(&self) -> usize {
        self.history.t()
    }

    /// The realised joint type. Players are not informed of other players'
    /// types; this exists only for benchmark oracles that are allowed to
    /// cheat (the correct-type reference agent).
    pub fn oracle_joint_type(&self) -> &[usize] {
        self.joint_type
    }
}

/// Source of actions for one player.
pub trait Controller<F: Real, G: GameModel<F>>: Send {
    fn name(&self) -> String;

    /// Called once before the first step of an episode.
    fn begin_episode(&mut self, _game: &G, _player: usize) {}

    /// Distribution over the player's actions at the current step. The
    /// engine samples from it with the player's own random stream.
    fn act(&mut self, ctx: &StepContext<'_, F, G>, rng: &mut StreamRng) -> Vec<F>;

    /// Called after every step with the history extended by the step's joint
    /// action and successor state.
    fn observe(&mut self, _ctx: &StepContext<'_, F, G>, _payoffs: &[F], _rng: &mut StreamRng) {}
}

/// Dispatches to one controller per type in the player's true type space.
/// Inactive types still observe every step so learners keep their state.
pub struct TypedPlayer<F: Real, G: GameModel<F>> {
    types: Vec<Box<dyn Controller<F, G>>>,
}

impl<F: Real, G: GameModel<F>> TypedPlayer<F, G> {
    pub fn new(types: Vec<Box<dyn Controller<F, G>>>) -> Self {
        assert!(!types.is_empty());
        Self { types }
    }
}

impl<F: Real, G: GameModel<F>> Controller<F, G> for TypedPlayer<F, G> {
    fn name(&self) -> String {
        let names: Vec<String> = self.types.iter().map(|c| c.name()).collect();
        format!("typed[{}]", names.join(","))
    }

    fn begin_episode(&mut self, game: &G, player: usize) {
        for c in &mut self.types {
            c.begin_episode(game, player);
        }
    }

    fn act(&mut self, ctx: &StepContext<'_, F, G>, rng: &mut StreamRng) -> Vec<F> {
        let k = ctx.own_type.min(self.types.len() - 1);
        self.types[k].act(ctx, rng)
    }

    fn observe(&mut self, ctx: &StepContext<'_, F, G>, payoffs: &[F], rng: &mut StreamRng) {
        for c in &mut self.types {
            c.observe(ctx, payoffs, rng);
        }
    }
}

/// One step of a path in its serialised form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord<F> {
    pub state: String,
    pub joint_action: JointAction,
    pub joint_type: JointType,
    pub payoffs: Vec<F>,
}

/// A realised path: the history plus the joint type and payoffs of every
/// step.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodePath<S, F> {
    pub seed: u64,
    pub domain: String,
    pub history: History<S>,
    pub types: Vec<JointType>,
    pub payoffs: Vec<Vec<F>>,
    pub terminating: bool,
}

impl<S, F: Real> EpisodePath<S, F> {
    /// `t_rho`.
    pub fn len(&self) -> usize {
        self.history.t()
    }

    pub fn is_empty(&self) -> bool {
        self.history.t() == 0
    }

    /// Sum of one player's payoffs over the path.
    pub fn total_payoff(&self, player: usize) -> F {
        self.payoffs.iter().map(|u| u[player]).sum()
    }

    pub fn steps<G: GameModel<F, State = S>>(&self, game: &G) -> Vec<StepRecord<F>> {
        (0..self.len())
            .map(|tau| StepRecord {
                state: game.state_key(self.history.state(tau)),
                joint_action: self.history.action(tau).clone(),
                joint_type: self.types[tau].clone(),
                payoffs: self.payoffs[tau].clone(),
            })
            .collect()
    }

    /// Canonical JSON object for the path.
    pub fn to_json<G: GameModel<F, State = S>>(&self, game: &G) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "domain": self.domain,
            "terminating": self.terminating,
            "length": self.len(),
            "final_state": game.state_key(self.history.current()),
            "steps": self.steps(game),
        })
    }
}

/// Plays one episode: sample types, sample actions, sample the transition and
/// accrue payoffs, until a terminal state or `t_max` steps.
///
/// All randomness derives from `seed`: the type schedule, the transitions and
/// each controller draw from separate streams.
pub fn run_episode<F: Real, G: GameModel<F>>(
    game: &G,
    schedule: &mut TypeSchedule<F>,
    controllers: &mut [Box<dyn Controller<F, G> + '_>],
    t_max: usize,
    seed: u64,
) -> Result<EpisodePath<G::State, F>, SbgError> {
    let n = game.num_players();
    if controllers.len() != n {
        return Err(SbgError::ControllerCount {
            expected: n,
            got: controllers.len(),
        });
    }
    let mut type_rng = rng::stream(seed, rng::TYPE_STREAM);
    let mut env_rng = rng::stream(seed, rng::ENV_STREAM);
    let mut player_rngs: Vec<StreamRng> = (0..n).map(|p| rng::player_stream(seed, p)).collect();

    for (p, c) in controllers.iter_mut().enumerate() {
        c.begin_episode(game, p);
    }

    let mut history = History::new(game.initial_state());
    let mut types = Vec::new();
    let mut payoffs = Vec::new();
    let mut terminating = game.is_terminal(history.current());

    while !terminating && history.t() < t_max {
        let t = history.t();
        let joint_type = schedule.sample(t, &mut type_rng);
        let mut joint = Vec::with_capacity(n);
        for (p, c) in controllers.iter_mut().enumerate() {
            let ctx = StepContext::new(game, &history, p, &joint_type);
            let probs = c.act(&ctx, &mut player_rngs[p]);
            if probs.len() != game.num_actions(p) {
                return Err(SbgError::WrongArity {
                    player: p,
                    expected: game.num_actions(p),
                    got: probs.len(),
                });
            }
            if !dist::is_distribution(&probs) {
                return Err(SbgError::NotNormalized { player: p, t });
            }
            joint.push(dist::sample_index(&probs, &mut player_rngs[p]));
        }
        let state = history.current().clone();
        let next = game.sample_transition(&state, &joint, &mut env_rng);
        let u = game.payoffs(&state, &joint);
        terminating = game.is_terminal(&next);
        history.push(joint, next);
        for (p, c) in controllers.iter_mut().enumerate() {
            let ctx = StepContext::new(game, &history, p, &joint_type);
            c.observe(&ctx, &u, &mut player_rngs[p]);
        }
        types.push(joint_type);
        payoffs.push(u);
    }

    Ok(EpisodePath {
        seed,
        domain: game.domain_id().to_string(),
        history,
        types,
        payoffs,
        terminating,
    })
}
