//! Sessions of the two-match protocol: one human plays the same game twice,
//! once against HBA and once against the game's baseline learner, in a
//! seeded random order that stays hidden until both matches end.

use hba_core::matrix::{MatrixKind, MATCH_ROUNDS};
use hba_core::matrix_agent::MatrixAgentKind;
use hba_core::posterior::SwitchStats;
use hba_core::record::{MatchRecord, MatchRunner, RecordError, RoundRecord};
use hba_core::rng::derive_seed;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

/// Version of the JSON payloads.
pub const SCHEMA_VERSION: u32 = 1;
pub const MATCHES_PER_SESSION: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    Finished,
}

/// Live session state.
pub struct Session {
    pub id: String,
    pub game: MatrixKind,
    pub seed: u64,
    pub order: [MatrixAgentKind; MATCHES_PER_SESSION],
    pub created_ms: u64,
    completed: Vec<MatchRecord>,
    current: Option<MatchRunner>,
}

/// One revealed round, without anything that identifies the opponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundView {
    pub round: usize,
    pub your_action: String,
    pub opponent_action: String,
    pub your_payoff: f64,
    pub opponent_payoff: f64,
    pub your_score: f64,
    pub opponent_score: f64,
}

impl RoundView {
    fn of(r: &RoundRecord) -> Self {
        Self {
            round: r.round,
            your_action: r.human_action.clone(),
            opponent_action: r.agent_action.clone(),
            your_payoff: r.payoffs[0],
            opponent_payoff: r.payoffs[1],
            your_score: r.cumulative[0],
            opponent_score: r.cumulative[1],
        }
    }
}

/// Final scores of a finished match, shown between matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchScore {
    pub match_index: usize,
    pub your_score: f64,
    pub opponent_score: f64,
}

/// What the client may see of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub schema_version: u32,
    pub id: String,
    pub game: MatrixKind,
    pub status: Status,
    pub matches_total: usize,
    pub rounds_per_match: usize,
    pub actions: Vec<String>,
    /// Index of the match being played; equals `matches_total` when done.
    pub match_index: usize,
    /// Next round of the current match.
    pub round: usize,
    pub your_score: f64,
    pub opponent_score: f64,
    pub rounds: Vec<RoundView>,
    pub completed_matches: Vec<MatchScore>,
}

/// Response to one move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveResult {
    pub schema_version: u32,
    pub match_index: usize,
    pub result: RoundView,
    pub match_over: bool,
    /// Present when this move ended a match.
    pub match_summary: Option<MatchScore>,
    pub session_finished: bool,
    pub next_match_index: usize,
    pub next_round: usize,
}

/// Per-match part of the final summary, with the opponent revealed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReveal {
    pub match_index: usize,
    pub opponent: MatrixAgentKind,
    pub your_score: f64,
    pub opponent_score: f64,
    pub welfare: f64,
    pub fairness: f64,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
    pub winning_rate: f64,
    /// Type-switch statistic of the human's play.
    pub your_type_switches: SwitchStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub schema_version: u32,
    pub id: String,
    pub game: MatrixKind,
    pub matches: Vec<MatchReveal>,
    pub total_score: f64,
    pub total_welfare: f64,
}

pub fn parse_game(id: &str) -> Result<MatrixKind, ApiError> {
    MatrixKind::parse(id).ok_or_else(|| ApiError::BadRequest(format!("unknown game {id:?}; use \"pd\" or \"rps\"")))
}

impl Session {
    /// A new session; `seed` fixes the opponent order and every agent
    /// decision.
    pub fn new(id: String, game: MatrixKind, seed: u64, created_ms: u64) -> Result<Self, ApiError> {
        let baseline = MatrixAgentKind::baseline_for(game);
        // Match seeds use indices 0 and 1; the order draw uses its own index.
        let order = if derive_seed(seed, u64::MAX) >> 63 == 1 {
            [MatrixAgentKind::Hba, baseline]
        } else {
            [baseline, MatrixAgentKind::Hba]
        };
        let mut s = Self {
            id,
            game,
            seed,
            order,
            created_ms,
            completed: Vec::new(),
            current: None,
        };
        s.current = Some(s.start_match(0)?);
        Ok(s)
    }

    fn start_match(&self, k: usize) -> Result<MatchRunner, ApiError> {
        let mut runner = MatchRunner::standard(self.game, self.order[k], derive_seed(self.seed, k as u64))
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        let rec = runner.record_mut();
        rec.session_id = Some(self.id.clone());
        rec.match_index = k;
        Ok(runner)
    }

    pub fn status(&self) -> Status {
        if self.current.is_some() {
            Status::Active
        } else {
            Status::Finished
        }
    }

    pub fn match_index(&self) -> usize {
        self.completed.len()
    }

    pub fn round(&self) -> usize {
        self.current.as_ref().map_or(0, |r| r.round())
    }

    pub fn completed(&self) -> &[MatchRecord] {
        &self.completed
    }

    pub fn view(&self) -> SessionView {
        let rounds: Vec<RoundView> = self
            .current
            .as_ref()
            .map(|r| r.record().rounds.iter().map(RoundView::of).collect())
            .unwrap_or_default();
        let last = rounds.last();
        SessionView {
            schema_version: SCHEMA_VERSION,
            id: self.id.clone(),
            game: self.game,
            status: self.status(),
            matches_total: MATCHES_PER_SESSION,
            rounds_per_match: MATCH_ROUNDS,
            actions: self.actions(),
            match_index: self.match_index(),
            round: self.round(),
            your_score: last.map_or(0.0, |r| r.your_score),
            opponent_score: last.map_or(0.0, |r| r.opponent_score),
            completed_matches: self.completed.iter().map(score_of).collect(),
            rounds,
        }
    }

    /// Action labels offered to the human.
    pub fn actions(&self) -> Vec<String> {
        hba_core::matrix::MatrixGame::<f64>::by_kind(self.game)
            .map(|g| g.labels[0].clone())
            .unwrap_or_default()
    }

    /// Checks a move without playing it, so it can be logged before it is
    /// applied.
    pub fn check(&self, action: &str, expected_round: Option<usize>) -> Result<(), ApiError> {
        let runner = self.current.as_ref().ok_or(ApiError::SessionFinished)?;
        if let Some(r) = expected_round {
            if r != runner.round() {
                return Err(ApiError::StaleRound {
                    expected: runner.round(),
                    got: r,
                });
            }
        }
        if !self.actions().iter().any(|a| a == action) {
            return Err(ApiError::BadRequest(format!(
                "illegal action {action:?}; expected one of {:?}",
                self.actions()
            )));
        }
        Ok(())
    }

    /// Plays one human move. `expected_round`, when given, must equal the
    /// round the server is waiting for, so a retried submission cannot
    /// count twice.
    pub fn submit(
        &mut self,
        action: &str,
        expected_round: Option<usize>,
        now_ms: u64,
    ) -> Result<(MoveResult, Option<MatchRecord>), ApiError> {
        self.check(action, expected_round)?;
        let k = self.match_index();
        let runner = self.current.as_mut().ok_or(ApiError::SessionFinished)?;
        let rec = runner.play(action, now_ms).map_err(|e| match e {
            RecordError::IllegalAction(a) => ApiError::BadRequest(format!("illegal action {a:?}")),
            RecordError::MatchOver => ApiError::SessionFinished,
            other => ApiError::Internal(other.to_string()),
        })?;
        let mut finished = None;
        if runner.is_over() {
            let done = self.current.take().expect("runner present").into_record();
            self.completed.push(done.clone());
            finished = Some(done);
            if self.completed.len() < MATCHES_PER_SESSION {
                self.current = Some(self.start_match(self.completed.len())?);
            }
        }
        Ok((
            MoveResult {
                schema_version: SCHEMA_VERSION,
                match_index: k,
                result: RoundView::of(&rec),
                match_over: finished.is_some(),
                match_summary: finished.as_ref().map(score_of),
                session_finished: self.status() == Status::Finished,
                next_match_index: self.match_index(),
                next_round: self.round(),
            },
            finished,
        ))
    }

    pub fn summary(&self) -> Result<SessionSummary, ApiError> {
        if self.status() != Status::Finished {
            return Err(ApiError::SessionIncomplete);
        }
        let mut matches = Vec::new();
        for rec in &self.completed {
            let t = rec.totals();
            matches.push(MatchReveal {
                match_index: rec.match_index,
                opponent: rec.opponent,
                your_score: t.human,
                opponent_score: t.agent,
                welfare: t.welfare,
                fairness: t.fairness,
                wins: t.human_wins,
                draws: t.draws,
                losses: t.agent_wins,
                winning_rate: t.human_wins as f64 / rec.rounds.len().max(1) as f64,
                your_type_switches: rec.human_switch_stats().map_err(|e| ApiError::Internal(e.to_string()))?,
            });
        }
        Ok(SessionSummary {
            schema_version: SCHEMA_VERSION,
            id: self.id.clone(),
            game: self.game,
            total_score: matches.iter().map(|m| m.your_score).sum(),
            total_welfare: matches.iter().map(|m| m.welfare).sum(),
            matches,
        })
    }
}

fn score_of(rec: &MatchRecord) -> MatchScore {
    let t = rec.totals();
    MatchScore {
        match_index: rec.match_index,
        your_score: t.human,
        opponent_score: t.agent,
    }
}
