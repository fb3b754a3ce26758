//! Repeated two-player matrix games: Prisoner's Dilemma and
//! Rock-Paper-Scissors, plus arbitrary matrices for testing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sbg::{GameModel, History};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    #[serde(rename = "pd")]
    PrisonersDilemma,
    #[serde(rename = "rps")]
    RockPaperScissors,
    Custom,
}

impl MatrixKind {
    pub fn id(&self) -> &'static str {
        match self {
            MatrixKind::PrisonersDilemma => "pd",
            MatrixKind::RockPaperScissors => "rps",
            MatrixKind::Custom => "matrix",
        }
    }

    pub fn parse(id: &str) -> Option<Self> {
        match id.to_ascii_lowercase().as_str() {
            "pd" => Some(MatrixKind::PrisonersDilemma),
            "rps" => Some(MatrixKind::RockPaperScissors),
            _ => None,
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

pub mod pd {
    pub const C: usize = 0;
    pub const D: usize = 1;
}

pub mod rps {
    pub const R: usize = 0;
    pub const P: usize = 1;
    pub const S: usize = 2;
}

/// Bimatrix stage game. `payoffs[a0][a1] = (u0, u1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame<F> {
    pub kind: MatrixKind,
    pub labels: [Vec<String>; 2],
    pub payoffs: Vec<Vec<[F; 2]>>,
}

impl<F: Real> MatrixGame<F> {
    pub fn prisoners_dilemma() -> Self {
        let l = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let p = |a: f64, b: f64| [F::lit(a), F::lit(b)];
        Self {
            kind: MatrixKind::PrisonersDilemma,
            labels: [l(&["C", "D"]), l(&["C", "D"])],
            payoffs: vec![vec![p(3., 3.), p(0., 5.)], vec![p(5., 0.), p(1., 1.)]],
        }
    }

    pub fn rock_paper_scissors() -> Self {
        let l = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let mut payoffs = vec![vec![[F::zero(); 2]; 3]; 3];
        for (a, row) in payoffs.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let u = rps_outcome(a, b);
                *cell = [F::lit(u), F::lit(-u)];
            }
        }
        Self {
            kind: MatrixKind::RockPaperScissors,
            labels: [l(&["R", "P", "S"]), l(&["R", "P", "S"])],
            payoffs,
        }
    }

    pub fn by_kind(kind: MatrixKind) -> Option<Self> {
        match kind {
            MatrixKind::PrisonersDilemma => Some(Self::prisoners_dilemma()),
            MatrixKind::RockPaperScissors => Some(Self::rock_paper_scissors()),
            MatrixKind::Custom => None,
        }
    }

    pub fn custom(payoffs: Vec<Vec<[F; 2]>>) -> Self {
        let rows = payoffs.len();
        let cols = payoffs.first().map_or(0, |r| r.len());
        assert!(rows > 0 && cols > 0 && payoffs.iter().all(|r| r.len() == cols));
        Self {
            kind: MatrixKind::Custom,
            labels: [
                (0..rows).map(|i| format!("a{i}")).collect(),
                (0..cols).map(|i| format!("b{i}")).collect(),
            ],
            payoffs,
        }
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.labels[player].len()
    }

    /// Per-player payoffs of a joint action.
    pub fn payoff(&self, a0: usize, a1: usize) -> [F; 2] {
        self.payoffs[a0][a1]
    }

    /// Payoff of `player` when it plays `own` and the other plays `other`.
    pub fn payoff_for(&self, player: usize, own: usize, other: usize) -> F {
        if player == 0 {
            self.payoffs[own][other][0]
        } else {
            self.payoffs[other][own][1]
        }
    }

    pub fn label(&self, player: usize, action: usize) -> &str {
        &self.labels[player][action]
    }

    pub fn parse_action(&self, player: usize, label: &str) -> Option<usize> {
        self.labels[player]
            .iter()
            .position(|l| l.eq_ignore_ascii_case(label.trim()))
    }
}

/// +1 if `a` beats `b`, -1 if it loses, 0 on a draw (R=0, P=1, S=2).
fn rps_outcome(a: usize, b: usize) -> f64 {
    match (3 + a - b) % 3 {
        0 => 0.0,
        1 => 1.0,
        _ => -1.0,
    }
}

/// State key used by frequency learners in repeated matrix games: the
/// previous joint action, or a distinguished initial key in round 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArtificialState {
    Init,
    Joint(usize, usize),
}

impl ArtificialState {
    pub fn key<F: Real>(&self, game: &MatrixGame<F>) -> String {
        match *self {
            ArtificialState::Init => "INIT".to_string(),
            ArtificialState::Joint(a, b) => format!("({},{})", game.label(0, a), game.label(1, b)),
        }
    }
}

pub fn artificial_state<S>(history: &History<S>) -> ArtificialState {
    match history.last_action() {
        None => ArtificialState::Init,
        Some(a) => ArtificialState::Joint(a[0], a[1]),
    }
}

/// The stage game repeated for a fixed number of rounds. The state is the
/// round index; the game ends after `rounds` rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedGame<F> {
    pub stage: MatrixGame<F>,
    pub rounds: usize,
}

/// Match length used by the human-machine protocol.
pub const MATCH_ROUNDS: usize = 20;

impl<F: Real> RepeatedGame<F> {
    pub fn new(stage: MatrixGame<F>, rounds: usize) -> Self {
        assert!(rounds > 0, "a repeated game needs at least one round");
        Self { stage, rounds }
    }
}

impl<F: Real> GameModel<F> for RepeatedGame<F> {
    type State = usize;

    fn domain_id(&self) -> &str {
        self.stage.kind.id()
    }

    fn num_players(&self) -> usize {
        2
    }

    fn num_actions(&self, player: usize) -> usize {
        self.stage.num_actions(player)
    }

    fn initial_state(&self) -> usize {
        0
    }

    fn is_terminal(&self, state: &usize) -> bool {
        *state >= self.rounds
    }

    fn payoffs(&self, _state: &usize, joint: &[usize]) -> Vec<F> {
        self.stage.payoff(joint[0], joint[1]).to_vec()
    }

    fn transitions(&self, state: &usize, _joint: &[usize]) -> Vec<(usize, F)> {
        vec![(state + 1, F::one())]
    }

    fn state_key(&self, state: &usize) -> String {
        format!("round{state}")
    }

    fn action_label(&self, player: usize, action: usize) -> String {
        self.stage.label(player, action).to_string()
    }
}

/// Welfare (sum) and fairness (product) of two match totals.
pub fn welfare_fairness<F: Real>(totals: [F; 2]) -> (F, F) {
    (totals[0] + totals[1], totals[0] * totals[1])
}
