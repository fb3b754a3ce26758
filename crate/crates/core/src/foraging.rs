//! Level-based foraging on a rectangular grid.
//!
//! Players move N/E/S/W or try to load an adjacent food. A group of players
//! adjacent to a food loads it when all of them chose `load` and their levels
//! sum to at least the food's level; each loader receives the food's level as
//! payoff and every other player receives -0.01.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::StreamRng;
use crate::sbg::GameModel;
use crate::scalar::Real;

pub const STEP_COST: f64 = -0.01;
pub const NUM_ACTIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    North,
    East,
    South,
    West,
    Load,
}

impl Move {
    pub const ALL: [Move; 5] = [Move::North, Move::East, Move::South, Move::West, Move::Load];
    pub const DIRECTIONS: [Move; 4] = [Move::North, Move::East, Move::South, Move::West];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Move {
        Move::ALL[i]
    }

    pub fn label(self) -> &'static str {
        match self {
            Move::North => "N",
            Move::East => "E",
            Move::South => "S",
            Move::West => "W",
            Move::Load => "load",
        }
    }

    fn delta(self) -> (i32, i32) {
        match self {
            Move::North => (0, -1),
            Move::East => (1, 0),
            Move::South => (0, 1),
            Move::West => (-1, 0),
            Move::Load => (0, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, m: Move) -> Pos {
        let (dx, dy) = m.delta();
        Pos::new(self.x + dx, self.y + dy)
    }

    pub fn manhattan(self, other: Pos) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn euclid(self, other: Pos) -> f64 {
        let dx = (self.x - other.x) as f64;
        let dy = (self.y - other.y) as f64;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_adjacent(self, other: Pos) -> bool {
        self.manhattan(other) == 1
    }

    pub fn neighbours(self) -> [Pos; 4] {
        Move::DIRECTIONS.map(|m| self.offset(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Player {
    pub pos: Pos,
    pub level: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Food {
    pub pos: Pos,
    pub level: u32,
    pub present: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForagingState {
    pub width: i32,
    pub height: i32,
    pub players: Vec<Player>,
    pub foods: Vec<Food>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForagingError {
    #[error("a foraging problem needs at least one food (the initial state would be terminal)")]
    NoFood,
    #[error("a foraging problem needs at least one player")]
    NoPlayers,
    #[error("grid {width}x{height} cannot hold {players} players and {foods} foods")]
    GridTooSmall {
        width: i32,
        height: i32,
        players: usize,
        foods: usize,
    },
    #[error("no valid placement found after {0} attempts")]
    PlacementFailed(usize),
}

impl ForagingState {
    pub fn in_grid(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height
    }

    pub fn on_border(&self, p: Pos) -> bool {
        p.x == 0 || p.y == 0 || p.x == self.width - 1 || p.y == self.height - 1
    }

    pub fn player_at(&self, p: Pos) -> Option<usize> {
        self.players.iter().position(|pl| pl.pos == p)
    }

    pub fn food_at(&self, p: Pos) -> Option<usize> {
        self.foods.iter().position(|f| f.present && f.pos == p)
    }

    pub fn is_free(&self, p: Pos) -> bool {
        self.in_grid(p) && self.player_at(p).is_none() && self.food_at(p).is_none()
    }

    pub fn remaining_foods(&self) -> usize {
        self.foods.iter().filter(|f| f.present).count()
    }

    pub fn is_terminal(&self) -> bool {
        self.remaining_foods() == 0
    }

    /// Largest food level allowed: the sum of the levels of the (up to) four
    /// weakest players.
    pub fn level_cap(levels: &[u32]) -> u32 {
        let mut v = levels.to_vec();
        v.sort_unstable();
        v.iter().take(4).sum()
    }

    /// Checks placement and level invariants.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut cells: Vec<Pos> = self.players.iter().map(|p| p.pos).collect();
        cells.extend(self.foods.iter().filter(|f| f.present).map(|f| f.pos));
        for c in &cells {
            if !self.in_grid(*c) {
                return Err(format!("entity outside grid at {c:?}"));
            }
        }
        let mut sorted = cells.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != cells.len() {
            return Err("two entities share a cell".into());
        }
        let levels: Vec<u32> = self.players.iter().map(|p| p.level).collect();
        let cap = Self::level_cap(&levels);
        for (i, f) in self.foods.iter().enumerate() {
            if self.on_border(f.pos) {
                return Err(format!("food {i} on the border"));
            }
            if f.level == 0 || f.level > cap {
                return Err(format!("food {i} level {} outside 1..={cap}", f.level));
            }
            for g in &self.foods[i + 1..] {
                if f.pos.euclid(g.pos) <= 1.0 {
                    return Err(format!("foods too close at {:?}", f.pos));
                }
            }
        }
        if self.players.iter().any(|p| p.level == 0) {
            return Err("player level 0".into());
        }
        Ok(())
    }

    /// Canonical key: dimensions, players and present foods.
    pub fn key(&self) -> String {
        let mut s = format!("{}x{}|", self.width, self.height);
        for p in &self.players {
            let _ = write!(s, "p{},{},{};", p.pos.x, p.pos.y, p.level);
        }
        s.push('|');
        for (i, f) in self.foods.iter().enumerate() {
            if f.present {
                let _ = write!(s, "f{i}@{},{},{};", f.pos.x, f.pos.y, f.level);
            }
        }
        s
    }

    /// ASCII rendering. Players are lower-case letters followed by their
    /// level, foods are `*` followed by their level.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let p = Pos::new(x, y);
                if let Some(i) = self.player_at(p) {
                    let _ = write!(out, "{}{} ", (b'a' + i as u8) as char, self.players[i].level);
                } else if let Some(k) = self.food_at(p) {
                    let _ = write!(out, "*{} ", self.foods[k].level);
                } else {
                    out.push_str(".. ");
                }
            }
            out.pop();
            out.push('\n');
        }
        out
    }

    /// Food indices loaded by `joint` and the players credited for each.
    ///
    /// Foods are considered from highest to lowest level; a loading player
    /// adjacent to several foods counts toward the first one whose group
    /// succeeds.
    pub fn resolve_loads(&self, joint: &[usize]) -> Vec<(usize, Vec<usize>)> {
        let mut order: Vec<usize> = (0..self.foods.len()).filter(|&k| self.foods[k].present).collect();
        order.sort_by(|&a, &b| self.foods[b].level.cmp(&self.foods[a].level).then(a.cmp(&b)));
        let mut used = vec![false; self.players.len()];
        let mut loaded = Vec::new();
        for k in order {
            let food = self.foods[k];
            let group: Vec<usize> = (0..self.players.len())
                .filter(|&i| {
                    !used[i] && joint[i] == Move::Load.index() && self.players[i].pos.is_adjacent(food.pos)
                })
                .collect();
            let total: u32 = group.iter().map(|&i| self.players[i].level).sum();
            if !group.is_empty() && total >= food.level {
                for &i in &group {
                    used[i] = true;
                }
                loaded.push((k, group));
            }
        }
        loaded
    }

    pub fn payoffs<F: Real>(&self, joint: &[usize]) -> Vec<F> {
        let mut u = vec![F::lit(STEP_COST); self.players.len()];
        for (k, group) in self.resolve_loads(joint) {
            for i in group {
                u[i] = F::from_u32(self.foods[k].level).unwrap();
            }
        }
        u
    }

    /// Movement targets grouped by cell. Moves into cells that are occupied
    /// at the start of the step, or off the grid, are dropped.
    fn contested_moves(&self, joint: &[usize]) -> Vec<(Pos, Vec<usize>)> {
        let mut groups: Vec<(Pos, Vec<usize>)> = Vec::new();
        for (i, &a) in joint.iter().enumerate() {
            let m = Move::from_index(a);
            if m == Move::Load {
                continue;
            }
            let target = self.players[i].pos.offset(m);
            if !self.is_free(target) {
                continue;
            }
            match groups.iter_mut().find(|(p, _)| *p == target) {
                Some((_, g)) => g.push(i),
                None => groups.push((target, vec![i])),
            }
        }
        groups
    }

    fn apply(&self, joint: &[usize], groups: &[(Pos, Vec<usize>)], winners: &[usize]) -> ForagingState {
        let mut next = self.clone();
        for (k, _) in self.resolve_loads(joint) {
            next.foods[k].present = false;
        }
        for ((target, contenders), &w) in groups.iter().zip(winners) {
            next.players[contenders[w]].pos = *target;
        }
        next
    }

    /// Samples the successor state. Contested cells go to a uniformly drawn
    /// contender; the others stay in place.
    pub fn step<F: Real>(&self, joint: &[usize], rng: &mut StreamRng) -> (ForagingState, Vec<F>) {
        let groups = self.contested_moves(joint);
        let winners: Vec<usize> = groups
            .iter()
            .map(|(_, g)| if g.len() == 1 { 0 } else { rng.random_range(0..g.len()) })
            .collect();
        (self.apply(joint, &groups, &winners), self.payoffs(joint))
    }

    /// Full successor distribution.
    pub fn successors<F: Real>(&self, joint: &[usize]) -> Vec<(ForagingState, F)> {
        let groups = self.contested_moves(joint);
        let mut winners = vec![0usize; groups.len()];
        let mut out: Vec<(ForagingState, F)> = Vec::new();
        loop {
            let p = groups
                .iter()
                .fold(F::one(), |acc, (_, g)| acc / F::from_usize_lossy(g.len()));
            let s = self.apply(joint, &groups, &winners);
            match out.iter_mut().find(|(t, _)| *t == s) {
                Some((_, q)) => *q = *q + p,
                None => out.push((s, p)),
            }
            // Odometer over the winners of every contested cell.
            let mut i = 0;
            loop {
                if i == groups.len() {
                    return out;
                }
                winners[i] += 1;
                if winners[i] < groups[i].1.len() {
                    break;
                }
                winners[i] = 0;
                i += 1;
            }
        }
    }
}

/// Parameters of a random foraging problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForagingSpec {
    pub width: i32,
    pub height: i32,
    pub players: usize,
    pub foods: usize,
    /// Defaults to the number of players.
    #[serde(default)]
    pub max_level: Option<u32>,
}

const PLACEMENT_ATTEMPTS: usize = 10_000;

/// Random positions and levels satisfying every state invariant. Player
/// levels are uniform in `1..=max_level`, food levels uniform in
/// `1..=cap` where `cap` is the level sum of the four weakest players.
pub fn generate_initial_state(rng: &mut StreamRng, spec: &ForagingSpec) -> Result<ForagingState, ForagingError> {
    let ForagingSpec {
        width,
        height,
        players: n,
        foods: m,
        max_level,
    } = *spec;
    if m == 0 {
        return Err(ForagingError::NoFood);
    }
    if n == 0 {
        return Err(ForagingError::NoPlayers);
    }
    let too_small = ForagingError::GridTooSmall {
        width,
        height,
        players: n,
        foods: m,
    };
    if width < 3 || height < 3 {
        return Err(too_small);
    }
    let interior: Vec<Pos> = (1..height - 1)
        .flat_map(|y| (1..width - 1).map(move |x| Pos::new(x, y)))
        .collect();
    let cells = (width * height) as usize;
    if interior.len() < m || cells < n + m {
        return Err(too_small);
    }
    let max_level = max_level.unwrap_or(n as u32).max(1);
    let levels: Vec<u32> = (0..n).map(|_| rng.random_range(1..=max_level)).collect();
    let cap = ForagingState::level_cap(&levels);

    let mut food_cells = None;
    for _ in 0..PLACEMENT_ATTEMPTS {
        let pick: Vec<Pos> = sample(rng, interior.len(), m).into_iter().map(|i| interior[i]).collect();
        let ok = pick
            .iter()
            .enumerate()
            .all(|(i, a)| pick[i + 1..].iter().all(|b| a.euclid(*b) > 1.0));
        if ok {
            food_cells = Some(pick);
            break;
        }
    }
    let food_cells = food_cells.ok_or(ForagingError::PlacementFailed(PLACEMENT_ATTEMPTS))?;
    let free: Vec<Pos> = (0..height)
        .flat_map(|y| (0..width).map(move |x| Pos::new(x, y)))
        .filter(|p| !food_cells.contains(p))
        .collect();
    let player_cells: Vec<Pos> = sample(rng, free.len(), n).into_iter().map(|i| free[i]).collect();

    let foods = food_cells
        .into_iter()
        .map(|pos| Food {
            pos,
            level: rng.random_range(1..=cap),
            present: true,
        })
        .collect();
    let players = player_cells
        .into_iter()
        .zip(levels)
        .map(|(pos, level)| Player { pos, level })
        .collect();
    Ok(ForagingState {
        width,
        height,
        players,
        foods,
    })
}

/// A foraging problem with a fixed initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ForagingGame<F> {
    pub initial: ForagingState,
    _f: std::marker::PhantomData<F>,
}

impl<F: Real> ForagingGame<F> {
    pub fn new(initial: ForagingState) -> Self {
        Self {
            initial,
            _f: std::marker::PhantomData,
        }
    }
}

impl<F: Real> GameModel<F> for ForagingGame<F> {
    type State = ForagingState;

    fn domain_id(&self) -> &str {
        "foraging"
    }

    fn num_players(&self) -> usize {
        self.initial.players.len()
    }

    fn num_actions(&self, _player: usize) -> usize {
        NUM_ACTIONS
    }

    fn initial_state(&self) -> ForagingState {
        self.initial.clone()
    }

    fn is_terminal(&self, state: &ForagingState) -> bool {
        state.is_terminal()
    }

    fn payoffs(&self, state: &ForagingState, joint: &[usize]) -> Vec<F> {
        state.payoffs(joint)
    }

    fn transitions(&self, state: &ForagingState, joint: &[usize]) -> Vec<(ForagingState, F)> {
        state.successors(joint)
    }

    fn sample_transition(&self, state: &ForagingState, joint: &[usize], rng: &mut StreamRng) -> ForagingState {
        state.step::<F>(joint, rng).0
    }

    fn state_key(&self, state: &ForagingState) -> String {
        state.key()
    }

    fn action_label(&self, _player: usize, action: usize) -> String {
        Move::from_index(action).label().to_string()
    }
}
