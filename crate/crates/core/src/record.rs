//! Matches between a human (or script) and an exact-planning agent, and the
//! persisted record of each match.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behavior::{build_matrix_space, SharedType, TypeSpec};
use crate::matrix::{MatrixKind, RepeatedGame, MATCH_ROUNDS};
use crate::matrix_agent::{repeated, Decision, MatrixAgent, MatrixAgentKind};
use crate::planner::PlanError;
use crate::posterior::{type_switch_stats, LikelihoodMode, Posterior, SwitchStats};
use crate::rng::{self, derive_seed, StreamRng};
use crate::sbg::History;

/// Version of the persisted record layout.
pub const RECORD_VERSION: u32 = 1;

/// The human is player 0, the agent player 1.
pub const HUMAN: usize = 0;
pub const AGENT: usize = 1;

const AGENT_STREAM: u64 = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("the match is over")]
    MatchOver,
    #[error("illegal action {0:?}")]
    IllegalAction(String),
    #[error("unsupported game {0}")]
    UnsupportedGame(String),
    #[error("planning failed: {0}")]
    Plan(#[from] PlanError),
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("replay diverges at round {round}: {what}")]
    Divergence { round: usize, what: String },
}

/// Randomness the agent may use in round `round` of a match seeded `seed`.
pub fn agent_round_rng(seed: u64, round: usize) -> StreamRng {
    rng::stream(derive_seed(seed, round as u64), AGENT_STREAM)
}

/// One round as shown to the human and persisted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub human_action: String,
    pub agent_action: String,
    /// `[human, agent]`.
    pub payoffs: [f64; 2],
    pub cumulative: [f64; 2],
    /// The agent's belief about the human before the round, if it has one.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub posterior: BTreeMap<String, f64>,
    /// The agent's planned action values.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    pub timestamp_ms: u64,
}

/// Persisted log of one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub version: u32,
    pub game: MatrixKind,
    pub opponent: MatrixAgentKind,
    pub seed: u64,
    pub rounds_total: usize,
    #[serde(default)]
    pub session_id: Option<String>,
    #[serde(default)]
    pub match_index: usize,
    pub rounds: Vec<RoundRecord>,
    pub started_ms: u64,
    #[serde(default)]
    pub finished_ms: Option<u64>,
}

/// Per-match totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchTotals {
    pub human: f64,
    pub agent: f64,
    pub welfare: f64,
    pub fairness: f64,
    pub human_wins: usize,
    pub draws: usize,
    pub agent_wins: usize,
}

impl MatchRecord {
    pub fn is_complete(&self) -> bool {
        self.rounds.len() == self.rounds_total
    }

    fn stage(&self) -> Result<RepeatedGame<f64>, RecordError> {
        repeated(self.game, self.rounds_total).ok_or_else(|| RecordError::UnsupportedGame(self.game.to_string()))
    }

    /// Joint actions `[human, agent]` as indices.
    pub fn history(&self) -> Result<History<usize>, RecordError> {
        let game = self.stage()?;
        let mut h = History::new(0usize);
        for (t, r) in self.rounds.iter().enumerate() {
            let parse = |p: usize, l: &str| {
                game.stage
                    .parse_action(p, l)
                    .ok_or_else(|| RecordError::Invalid(format!("round {t}: unknown action {l:?}")))
            };
            h.push(vec![parse(HUMAN, &r.human_action)?, parse(AGENT, &r.agent_action)?], t + 1);
        }
        Ok(h)
    }

    /// Structural checks: round numbering, round cap, payoffs and running
    /// sums.
    pub fn validate(&self) -> Result<(), RecordError> {
        if self.version != RECORD_VERSION {
            return Err(RecordError::Invalid(format!("unsupported version {}", self.version)));
        }
        if self.rounds.len() > self.rounds_total {
            return Err(RecordError::Invalid(format!(
                "{} rounds recorded, the match lasts {}",
                self.rounds.len(),
                self.rounds_total
            )));
        }
        let game = self.stage()?;
        let h = self.history()?;
        let mut cum = [0.0f64; 2];
        for (t, r) in self.rounds.iter().enumerate() {
            if r.round != t {
                return Err(RecordError::Invalid(format!("round {t} is numbered {}", r.round)));
            }
            let a = h.action(t);
            let u = game.stage.payoff(a[HUMAN], a[AGENT]);
            if r.payoffs != u {
                return Err(RecordError::Invalid(format!("round {t}: payoffs {:?}, expected {u:?}", r.payoffs)));
            }
            cum[0] += u[0];
            cum[1] += u[1];
            if (r.cumulative[0] - cum[0]).abs() > 1e-9 || (r.cumulative[1] - cum[1]).abs() > 1e-9 {
                return Err(RecordError::Invalid(format!("round {t}: cumulative scores do not add up")));
            }
        }
        Ok(())
    }

    pub fn totals(&self) -> MatchTotals {
        let (h, a) = self
            .rounds
            .last()
            .map_or((0.0, 0.0), |r| (r.cumulative[0], r.cumulative[1]));
        let count = |f: fn(&RoundRecord) -> bool| self.rounds.iter().filter(|r| f(r)).count();
        MatchTotals {
            human: h,
            agent: a,
            welfare: h + a,
            fairness: h * a,
            human_wins: count(|r| r.payoffs[0] > r.payoffs[1]),
            draws: count(|r| r.payoffs[0] == r.payoffs[1]),
            agent_wins: count(|r| r.payoffs[0] < r.payoffs[1]),
        }
    }

    /// The agent's recorded belief trace, ordered by type label.
    pub fn posterior_trace(&self) -> Vec<Vec<f64>> {
        self.rounds
            .iter()
            .filter(|r| !r.posterior.is_empty())
            .map(|r| r.posterior.values().copied().collect())
            .collect()
    }

    /// Posterior over the game's standard types, fitted to the human's
    /// actions with the protocol's time weight; one entry per round after
    /// the first action. Computed from the actions alone, so it exists for
    /// matches against either opponent.
    pub fn human_type_trace(&self) -> Result<Vec<Vec<f64>>, RecordError> {
        let game = self.stage()?;
        let specs = match self.game {
            MatrixKind::PrisonersDilemma => TypeSpec::pd_table(),
            MatrixKind::RockPaperScissors => TypeSpec::rps_table(),
            MatrixKind::Custom => return Err(RecordError::UnsupportedGame(self.game.to_string())),
        };
        let types: Vec<SharedType<usize, f64>> =
            build_matrix_space(&specs, &game.stage).map_err(RecordError::Invalid)?;
        let mut post = Posterior::uniform(
            types.iter().map(|t| t.name()).collect(),
            LikelihoodMode::reweighted(10.0, 0.05, 3.0),
        );
        let h = self.history()?;
        let mut trace = Vec::with_capacity(h.t());
        for t in 0..h.t() {
            let a = h.played(t, HUMAN);
            let probs: Vec<f64> = types.iter().map(|ty| ty.policy(&h, t, HUMAN)[a]).collect();
            post.observe(&probs);
            trace.push(post.probabilities().to_vec());
        }
        Ok(trace)
    }

    /// Type-switch statistic of the human.
    pub fn human_switch_stats(&self) -> Result<SwitchStats, RecordError> {
        Ok(type_switch_stats(&self.human_type_trace()?))
    }

    /// Re-runs the agent on the recorded human actions and checks that every
    /// agent action and score is reproduced.
    pub fn replay(&self) -> Result<(), RecordError> {
        self.validate()?;
        let mut runner = MatchRunner::new(self.game, self.opponent, self.seed, self.rounds_total)?;
        for (t, r) in self.rounds.iter().enumerate() {
            let got = runner.play(&r.human_action, r.timestamp_ms)?;
            if got.agent_action != r.agent_action {
                return Err(RecordError::Divergence {
                    round: t,
                    what: format!("agent played {} on replay, {} in the record", got.agent_action, r.agent_action),
                });
            }
            if got.cumulative != r.cumulative {
                return Err(RecordError::Divergence {
                    round: t,
                    what: "cumulative scores differ".into(),
                });
            }
        }
        Ok(())
    }
}

/// Drives one match. The agent's action for a round is planned from the
/// history before that round, before the human's action is read.
pub struct MatchRunner {
    game: RepeatedGame<f64>,
    agent: MatrixAgent<f64>,
    history: History<usize>,
    pending: Option<Decision>,
    record: MatchRecord,
}

impl MatchRunner {
    pub fn new(game: MatrixKind, opponent: MatrixAgentKind, seed: u64, rounds: usize) -> Result<Self, RecordError> {
        let g = repeated(game, rounds).ok_or_else(|| RecordError::UnsupportedGame(game.to_string()))?;
        let agent = MatrixAgent::protocol(&g, AGENT, opponent).map_err(RecordError::Invalid)?;
        let mut runner = Self {
            game: g,
            agent,
            history: History::new(0),
            pending: None,
            record: MatchRecord {
                version: RECORD_VERSION,
                game,
                opponent,
                seed,
                rounds_total: rounds,
                session_id: None,
                match_index: 0,
                rounds: Vec::new(),
                started_ms: 0,
                finished_ms: None,
            },
        };
        runner.commit()?;
        Ok(runner)
    }

    /// A standard-length match.
    pub fn standard(game: MatrixKind, opponent: MatrixAgentKind, seed: u64) -> Result<Self, RecordError> {
        Self::new(game, opponent, seed, MATCH_ROUNDS)
    }

    fn commit(&mut self) -> Result<(), RecordError> {
        let t = self.history.t();
        self.pending = if t < self.game.rounds {
            let mut r = agent_round_rng(self.record.seed, t);
            Some(self.agent.decide(&self.game, &self.history, &mut r)?)
        } else {
            None
        };
        Ok(())
    }

    pub fn round(&self) -> usize {
        self.history.t()
    }

    pub fn is_over(&self) -> bool {
        self.history.t() >= self.game.rounds
    }

    pub fn game(&self) -> &RepeatedGame<f64> {
        &self.game
    }

    pub fn record(&self) -> &MatchRecord {
        &self.record
    }

    pub fn record_mut(&mut self) -> &mut MatchRecord {
        &mut self.record
    }

    pub fn into_record(self) -> MatchRecord {
        self.record
    }

    /// Action labels available to the human.
    pub fn human_actions(&self) -> Vec<String> {
        self.game.stage.labels[HUMAN].clone()
    }

    /// Plays one round with the human's action label.
    pub fn play(&mut self, human_action: &str, now_ms: u64) -> Result<RoundRecord, RecordError> {
        if self.is_over() {
            return Err(RecordError::MatchOver);
        }
        let h = self
            .game
            .stage
            .parse_action(HUMAN, human_action)
            .ok_or_else(|| RecordError::IllegalAction(human_action.to_string()))?;
        let decision = self.pending.take().expect("a committed action exists while the match runs");
        let posterior = self.agent.posterior_snapshot();
        let a = decision.action;
        let u = self.game.stage.payoff(h, a);
        let t = self.history.t();
        if t == 0 {
            self.record.started_ms = now_ms;
        }
        let prev = self.record.rounds.last().map_or([0.0, 0.0], |r| r.cumulative);
        let rec = RoundRecord {
            round: t,
            human_action: self.game.stage.label(HUMAN, h).to_string(),
            agent_action: self.game.stage.label(AGENT, a).to_string(),
            payoffs: u,
            cumulative: [prev[0] + u[0], prev[1] + u[1]],
            posterior,
            values: decision.values,
            timestamp_ms: now_ms,
        };
        self.history.push(vec![h, a], t + 1);
        self.agent.observe_round(&self.history);
        self.record.rounds.push(rec.clone());
        if self.is_over() {
            self.record.finished_ms = Some(now_ms);
        }
        self.commit()?;
        Ok(rec)
    }
}
