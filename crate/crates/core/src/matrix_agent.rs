//! Agents for repeated matrix games that plan with the exact finite-horizon
//! planner: HBA over a type posterior, and the frequency learners JAL/CJAL
//! keyed on the artificial state.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::behavior::{build_matrix_space, SharedType, TypeSpec};
use crate::dist;
use crate::matrix::{artificial_state, ArtificialState, MatrixGame, MatrixKind, RepeatedGame};
use crate::planner::{ExactPlanner, OpponentModel, PlanError, TypeBelief, TypeMixture};
use crate::posterior::{LikelihoodMode, Posterior};
use crate::rl::FrequencyModel;
use crate::rng::StreamRng;
use crate::sbg::{Controller, GameModel, History, StepContext};
use crate::scalar::Real;

/// Which opponent model an exact-planning agent uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixAgentKind {
    Hba,
    Jal,
    Cjal,
}

impl MatrixAgentKind {
    pub fn id(self) -> &'static str {
        match self {
            MatrixAgentKind::Hba => "hba",
            MatrixAgentKind::Jal => "jal",
            MatrixAgentKind::Cjal => "cjal",
        }
    }

    /// The learner each game is compared against in the human protocol.
    pub fn baseline_for(game: MatrixKind) -> Self {
        match game {
            MatrixKind::PrisonersDilemma => MatrixAgentKind::Cjal,
            MatrixKind::RockPaperScissors | MatrixKind::Custom => MatrixAgentKind::Jal,
        }
    }
}

/// Planning horizon used with each game.
pub fn default_horizon(game: MatrixKind) -> usize {
    match game {
        MatrixKind::PrisonersDilemma => 10,
        MatrixKind::RockPaperScissors | MatrixKind::Custom => 1,
    }
}

/// One planning decision, kept for logging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub action: usize,
    pub values: Vec<f64>,
}

enum Model<F: Real> {
    Types {
        types: Vec<SharedType<usize, F>>,
        posterior: Posterior<F>,
    },
    Frequencies(FrequencyModel<ArtificialState>),
}

/// Frozen frequency counts as an opponent model. Predictions depend only on
/// the artificial state, which therefore serves as the memo key.
struct FrequencyOpponent<'a> {
    freq: &'a FrequencyModel<ArtificialState>,
    actions: usize,
}

impl<F: Real> OpponentModel<usize, F> for FrequencyOpponent<'_> {
    fn predict(&self, history: &History<usize>, player: usize, own: usize) -> Vec<F> {
        self.freq.predict(&artificial_state(history), player, own)
    }

    fn key(&self, history: &History<usize>) -> Option<Vec<u128>> {
        let k = match artificial_state(history) {
            ArtificialState::Init => 0,
            ArtificialState::Joint(a, b) => 1 + (a * self.actions + b) as u128,
        };
        Some(vec![k])
    }
}

/// An exact-planning agent for two-player repeated matrix games.
pub struct MatrixAgent<F: Real> {
    kind: MatrixAgentKind,
    me: usize,
    planner: ExactPlanner,
    model: Model<F>,
    last: Option<Decision>,
}

impl<F: Real> MatrixAgent<F> {
    /// HBA over `types` (a model of the other player) with the given
    /// likelihood mode.
    pub fn hba(
        game: &RepeatedGame<F>,
        me: usize,
        types: &[TypeSpec],
        mode: LikelihoodMode,
        horizon: usize,
    ) -> Result<Self, String> {
        if types.is_empty() {
            return Err("HBA needs a non-empty type space".into());
        }
        let types = build_matrix_space(types, &game.stage)?;
        let labels = types.iter().map(|t| t.name()).collect();
        Ok(Self {
            kind: MatrixAgentKind::Hba,
            me,
            planner: ExactPlanner::new(horizon, game.rounds),
            model: Model::Types {
                types,
                posterior: Posterior::uniform(labels, mode),
            },
            last: None,
        })
    }

    pub fn learner(game: &RepeatedGame<F>, me: usize, conditional: bool, horizon: usize) -> Self {
        let actions = (0..2).map(|p| game.stage.num_actions(p)).collect();
        Self {
            kind: if conditional {
                MatrixAgentKind::Cjal
            } else {
                MatrixAgentKind::Jal
            },
            me,
            planner: ExactPlanner::new(horizon, game.rounds),
            model: Model::Frequencies(FrequencyModel::new(actions, conditional)),
            last: None,
        }
    }

    /// The agent used by the human protocol for `kind` in `game`.
    pub fn protocol(game: &RepeatedGame<F>, me: usize, kind: MatrixAgentKind) -> Result<Self, String> {
        let horizon = default_horizon(game.stage.kind);
        match kind {
            MatrixAgentKind::Hba => {
                let types = match game.stage.kind {
                    MatrixKind::PrisonersDilemma => TypeSpec::pd_table(),
                    MatrixKind::RockPaperScissors => TypeSpec::rps_table(),
                    MatrixKind::Custom => return Err("no default type space for custom games".into()),
                };
                Self::hba(game, me, &types, LikelihoodMode::reweighted(10.0, 0.05, 3.0), horizon)
            }
            MatrixAgentKind::Jal => Ok(Self::learner(game, me, false, horizon)),
            MatrixAgentKind::Cjal => Ok(Self::learner(game, me, true, horizon)),
        }
    }

    pub fn kind(&self) -> MatrixAgentKind {
        self.kind
    }

    pub fn player(&self) -> usize {
        self.me
    }

    pub fn last_decision(&self) -> Option<&Decision> {
        self.last.as_ref()
    }

    pub fn posterior(&self) -> Option<&Posterior<F>> {
        match &self.model {
            Model::Types { posterior, .. } => Some(posterior),
            Model::Frequencies(_) => None,
        }
    }

    /// Type name to probability, empty for frequency learners.
    pub fn posterior_snapshot(&self) -> BTreeMap<String, f64> {
        self.posterior().map(|p| p.snapshot()).unwrap_or_default()
    }

    /// Forgets everything learned, for a fresh match.
    pub fn reset(&mut self) {
        match &mut self.model {
            Model::Types { posterior, .. } => posterior.reset(),
            Model::Frequencies(f) => f.clear(),
        }
        self.last = None;
    }

    /// Plans the action for the round after `history`.
    pub fn decide(
        &mut self,
        game: &RepeatedGame<F>,
        history: &History<usize>,
        rng: &mut StreamRng,
    ) -> Result<Decision, PlanError> {
        let other = 1 - self.me;
        let (action, values) = match &self.model {
            Model::Types { types, posterior } => {
                let weights = posterior.probabilities();
                let mut players: Vec<TypeBelief<usize, F>> = vec![(&[], &[]); 2];
                players[other] = (types, weights);
                let mix = TypeMixture { players };
                self.planner.choose(game, history, self.me, &mix, rng)?
            }
            Model::Frequencies(freq) => {
                let model = FrequencyOpponent {
                    freq,
                    actions: game.stage.num_actions(other),
                };
                self.planner.choose(game, history, self.me, &model, rng)?
            }
        };
        let d = Decision {
            action,
            values: values.iter().map(|v| v.as_f64()).collect(),
        };
        self.last = Some(d.clone());
        Ok(d)
    }

    /// Folds in the most recent round of `history`.
    pub fn observe_round(&mut self, history: &History<usize>) {
        let t = history.t();
        if t == 0 {
            return;
        }
        let other = 1 - self.me;
        match &mut self.model {
            Model::Types { types, posterior } => {
                let a = history.played(t - 1, other);
                let probs: Vec<F> = types.iter().map(|ty| ty.policy(history, t - 1, other)[a]).collect();
                posterior.observe(&probs);
            }
            Model::Frequencies(freq) => {
                let key = artificial_state(&history.prefix(t - 1));
                freq.observe(&key, self.me, history.action(t - 1));
            }
        }
    }

    pub fn frequencies(&self) -> Option<&FrequencyModel<ArtificialState>> {
        match &self.model {
            Model::Frequencies(f) => Some(f),
            Model::Types { .. } => None,
        }
    }
}

impl<F: Real> Controller<F, RepeatedGame<F>> for MatrixAgent<F> {
    fn name(&self) -> String {
        self.kind.id().to_string()
    }

    fn begin_episode(&mut self, _game: &RepeatedGame<F>, player: usize) {
        self.me = player;
        self.reset();
    }

    fn act(&mut self, ctx: &StepContext<'_, F, RepeatedGame<F>>, rng: &mut StreamRng) -> Vec<F> {
        let n = ctx.game.num_actions(self.me);
        match self.decide(ctx.game, ctx.history, rng) {
            Ok(d) => dist::point_mass(n, d.action),
            Err(e) => {
                log::warn!("planner failed: {e}; acting uniformly");
                dist::uniform(n)
            }
        }
    }

    fn observe(&mut self, ctx: &StepContext<'_, F, RepeatedGame<F>>, _payoffs: &[F], _rng: &mut StreamRng) {
        self.observe_round(ctx.history);
    }
}

/// Convenience constructor for a repeated game of `kind` with `rounds` rounds.
pub fn repeated<F: Real>(kind: MatrixKind, rounds: usize) -> Option<RepeatedGame<F>> {
    MatrixGame::by_kind(kind).map(|stage| RepeatedGame::new(stage, rounds))
}
