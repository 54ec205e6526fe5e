//! SET tic-tac-toe.
//!
//! The nine cards of a magic SET square form the pool. Players alternately
//! claim a card and the first player holding a set wins. Inside a magic
//! square the only sets are its twelve lines, so the game is tic-tac-toe
//! with broken diagonals counted as lines.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::card::{is_set, third_card, Card, SetTriple};
use crate::error::{Error, Result};
use crate::square::{all_lines, MagicSquare};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    First,
    Second,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::First => "first",
            Player::Second => "second",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    InProgress,
    Won { player: Player, line: SetTriple },
}

/// Bitmasks over grid positions (row-major) of the twelve lines.
fn line_masks() -> [u16; 12] {
    all_lines().map(|(_, _, cells)| cells.iter().fold(0u16, |m, p| m | (1 << p.index())))
}

const FULL: u16 = 0x1ff;

fn has_line(mask: u16, lines: &[u16; 12]) -> Option<u16> {
    lines.iter().copied().find(|&l| mask & l == l)
}

/// A position: the pool, the claims so far (alternating, first player
/// first), and whether someone has won.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pool: MagicSquare,
    moves: Vec<Card>,
    status: Status,
}

impl GameState {
    pub fn new(pool: MagicSquare) -> GameState {
        GameState { pool, moves: Vec::new(), status: Status::InProgress }
    }

    pub fn pool(&self) -> &MagicSquare {
        &self.pool
    }

    /// Claimed cards in the order they were taken.
    pub fn moves(&self) -> &[Card] {
        &self.moves
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_over(&self) -> bool {
        self.status != Status::InProgress || self.moves.len() == 9
    }

    pub fn winner(&self) -> Option<(Player, SetTriple)> {
        match self.status {
            Status::Won { player, line } => Some((player, line)),
            Status::InProgress => None,
        }
    }

    pub fn to_move(&self) -> Player {
        if self.moves.len().is_multiple_of(2) {
            Player::First
        } else {
            Player::Second
        }
    }

    pub fn claimed_by(&self, player: Player) -> Vec<Card> {
        let offset = match player {
            Player::First => 0,
            Player::Second => 1,
        };
        self.moves.iter().skip(offset).step_by(2).copied().collect()
    }

    /// Number of cards `player` has taken.
    pub fn picks(&self, player: Player) -> usize {
        match player {
            Player::First => self.moves.len().div_ceil(2),
            Player::Second => self.moves.len() / 2,
        }
    }

    /// Unclaimed cards in ascending order; empty once the game is over.
    pub fn legal_moves(&self) -> Vec<Card> {
        if self.status != Status::InProgress {
            return Vec::new();
        }
        self.pool.cards().into_iter().filter(|c| !self.moves.contains(c)).sorted().collect()
    }

    /// Position masks (first, second).
    fn masks(&self) -> (u16, u16) {
        let mut masks = (0u16, 0u16);
        for (i, &card) in self.moves.iter().enumerate() {
            let bit = 1 << self.pool.position_of(card).expect("claimed cards come from the pool").index();
            if i % 2 == 0 {
                masks.0 |= bit;
            } else {
                masks.1 |= bit;
            }
        }
        masks
    }

    pub fn apply_move(&self, card: Card) -> Result<GameState> {
        if self.is_over() {
            return Err(Error::GameOver);
        }
        if self.pool.position_of(card).is_none() || self.moves.contains(&card) {
            return Err(Error::IllegalMove(card));
        }
        let mover = self.to_move();
        let mut next = self.clone();
        next.moves.push(card);
        let (first, second) = next.masks();
        let own = if mover == Player::First { first } else { second };
        if let Some(line) = has_line(own, &line_masks()) {
            let [a, b, c] = (0..9)
                .filter(|i| line & (1 << i) != 0)
                .map(|i| next.pool.cards()[i])
                .collect_array()
                .expect("three cells per line");
            next.status = Status::Won {
                player: mover,
                line: SetTriple::new(a, b, c).expect("lines are sets"),
            };
        }
        Ok(next)
    }

    /// `"<nine pool cards> ; <claimed cards in order>"`.
    pub fn transcript(&self) -> String {
        let mut out = format!("{} ;", self.pool);
        for card in &self.moves {
            out.push(' ');
            out += &card.to_string();
        }
        out
    }

    /// Replays a transcript, rejecting illegal or post-game moves.
    pub fn from_transcript(text: &str) -> Result<GameState> {
        let (pool, moves) =
            text.split_once(';').ok_or_else(|| Error::Transcript("missing ';'".into()))?;
        let mut state = GameState::new(pool.parse()?);
        for token in moves.split_whitespace() {
            state = state.apply_move(token.parse()?)?;
        }
        Ok(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    FirstWins,
    SecondWins,
    Draw,
}

/// Result of perfect play from a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GameValue {
    pub outcome: Outcome,
    /// Further claims until the game ends.
    pub plies_to_outcome: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solution {
    pub value: GameValue,
    pub best_move: Card,
    /// Total cards the first player holds when the game ends.
    pub first_player_picks: usize,
}

const WIN: i8 = 20;
const UNKNOWN: i8 = i8::MIN;

/// Full-depth minimax over one pool, memoized on claim masks.
///
/// Scores are from the side to move: `WIN - p` for a win in `p` plies,
/// `p - WIN` for a loss, 0 for a draw. Ties go to the smallest card.
pub struct Solver {
    pool: MagicSquare,
    lines: [u16; 12],
    /// Positions sorted by the card they hold.
    by_card: [usize; 9],
    memo: Vec<i8>,
}

impl Solver {
    pub fn new(pool: MagicSquare) -> Solver {
        let cards = pool.cards();
        let mut by_card: [usize; 9] = std::array::from_fn(|i| i);
        by_card.sort_by_key(|&i| cards[i]);
        Solver { pool, lines: line_masks(), by_card, memo: vec![UNKNOWN; 1 << 18] }
    }

    pub fn pool(&self) -> &MagicSquare {
        &self.pool
    }

    fn score(&mut self, mover: u16, waiting: u16) -> i8 {
        if has_line(waiting, &self.lines).is_some() {
            return -WIN;
        }
        if mover | waiting == FULL {
            return 0;
        }
        let key = (usize::from(mover) << 9) | usize::from(waiting);
        if self.memo[key] != UNKNOWN {
            return self.memo[key];
        }
        let mut best = i8::MIN;
        for i in 0..9 {
            let bit = 1u16 << i;
            if (mover | waiting) & bit == 0 {
                best = best.max(Self::lift(self.score(waiting, mover | bit)));
            }
        }
        self.memo[key] = best;
        best
    }

    /// Parent score from a child's score, one ply further away.
    fn lift(child: i8) -> i8 {
        match child {
            0 => 0,
            s if s > 0 => -(s - 1),
            s => -(s + 1),
        }
    }

    pub fn solve(&mut self, state: &GameState) -> Result<Solution> {
        if state.pool != self.pool {
            return Err(Error::Transcript("state belongs to a different pool".into()));
        }
        if state.is_over() {
            return Err(Error::GameOver);
        }
        let (first, second) = state.masks();
        let mover = state.to_move();
        let (own, other) = if mover == Player::First { (first, second) } else { (second, first) };
        let mut best: Option<(i8, usize)> = None;
        for pos in self.by_card {
            let bit = 1u16 << pos;
            if (own | other) & bit != 0 {
                continue;
            }
            let s = Self::lift(self.score(other, own | bit));
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, pos));
            }
        }
        let (score, pos) = best.expect("an unfinished game has a free card");
        let value = match score {
            0 => GameValue { outcome: Outcome::Draw, plies_to_outcome: 9 - state.moves.len() as u32 },
            s => {
                let winner = if s > 0 { mover } else { mover.other() };
                GameValue {
                    outcome: if winner == Player::First { Outcome::FirstWins } else { Outcome::SecondWins },
                    plies_to_outcome: (WIN - s.abs()) as u32,
                }
            }
        };
        let first_player_picks = (state.moves.len() + value.plies_to_outcome as usize).div_ceil(2);
        Ok(Solution { value, best_move: self.pool.cards()[pos], first_player_picks })
    }
}

pub fn exact_solve(state: &GameState) -> Result<Solution> {
    Solver::new(*state.pool()).solve(state)
}

/// Smallest available card completing a pair of `own` to a set.
fn completion(own: &[Card], available: &[Card]) -> Option<Card> {
    own.iter()
        .tuple_combinations()
        .filter_map(|(&a, &b)| third_card(a, b).ok())
        .filter(|c| available.contains(c))
        .min()
}

/// The first player's strategy: win if possible, otherwise block the
/// opponent's completion, otherwise play the solver's move.
pub fn strategy_move_with(solver: &mut Solver, state: &GameState) -> Result<Card> {
    if state.is_over() {
        return Err(Error::GameOver);
    }
    if state.to_move() != Player::First {
        return Err(Error::WrongTurn);
    }
    let available = state.legal_moves();
    if let Some(card) = completion(&state.claimed_by(Player::First), &available) {
        return Ok(card);
    }
    if let Some(card) = completion(&state.claimed_by(Player::Second), &available) {
        return Ok(card);
    }
    Ok(solver.solve(state)?.best_move)
}

pub fn strategy_move(state: &GameState) -> Result<Card> {
    strategy_move_with(&mut Solver::new(*state.pool()), state)
}

/// Worst case of a first-player policy over every second-player reply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StrategyAudit {
    /// Complete games explored.
    pub games: u64,
    pub second_player_wins: u64,
    /// Games the first player won with more than four cards.
    pub slow_wins: u64,
    pub max_first_player_picks: usize,
}

impl StrategyAudit {
    pub fn always_wins_within_four(&self) -> bool {
        self.games > 0 && self.second_player_wins == 0 && self.slow_wins == 0
    }

    fn record(&mut self, state: &GameState) {
        self.games += 1;
        match state.winner() {
            Some((Player::First, _)) => {
                let picks = state.picks(Player::First);
                self.max_first_player_picks = self.max_first_player_picks.max(picks);
                if picks > 4 {
                    self.slow_wins += 1;
                }
            }
            Some((Player::Second, _)) => self.second_player_wins += 1,
            // A full board with no winner is impossible, count it as a loss.
            None => self.second_player_wins += 1,
        }
    }
}

/// Plays [`strategy_move_with`] for the first player against every
/// possible sequence of second-player replies.
pub fn audit_strategy(pool: &MagicSquare) -> StrategyAudit {
    fn walk(state: &GameState, solver: &mut Solver, audit: &mut StrategyAudit) {
        if state.is_over() {
            audit.record(state);
            return;
        }
        match state.to_move() {
            Player::First => {
                let card = strategy_move_with(solver, state).expect("first player to move");
                walk(&state.apply_move(card).expect("legal"), solver, audit);
            }
            Player::Second => {
                for card in state.legal_moves() {
                    walk(&state.apply_move(card).expect("legal"), solver, audit);
                }
            }
        }
    }
    let mut audit = StrategyAudit::default();
    walk(&GameState::new(*pool), &mut Solver::new(*pool), &mut audit);
    audit
}

/// Like [`audit_strategy`], but the first player follows the rule as
/// literally stated: complete a set if possible, else block, else take any
/// card. Every choice left open is explored, so the audit covers all ways
/// of following the rule.
pub fn audit_literal_strategy(pool: &MagicSquare) -> StrategyAudit {
    fn walk(state: &GameState, audit: &mut StrategyAudit) {
        if state.is_over() {
            audit.record(state);
            return;
        }
        let available = state.legal_moves();
        let choices = match state.to_move() {
            Player::First => {
                let completing = |own: &[Card]| -> Vec<Card> {
                    available
                        .iter()
                        .copied()
                        .filter(|&c| own.iter().tuple_combinations().any(|(&a, &b)| is_set(a, b, c)))
                        .collect()
                };
                let wins = completing(&state.claimed_by(Player::First));
                let blocks = completing(&state.claimed_by(Player::Second));
                if !wins.is_empty() {
                    wins
                } else if !blocks.is_empty() {
                    blocks
                } else {
                    available
                }
            }
            Player::Second => available,
        };
        for card in choices {
            walk(&state.apply_move(card).expect("legal"), audit);
        }
    }
    let mut audit = StrategyAudit::default();
    walk(&GameState::new(*pool), &mut audit);
    audit
}

/// Largest subset of the square's cards containing no set.
pub fn max_setfree_subset(sq: &MagicSquare) -> usize {
    let cards = sq.cards();
    (0u16..1 << 9)
        .filter(|&mask| {
            let chosen: Vec<Card> = (0..9).filter(|i| mask & (1 << i) != 0).map(|i| cards[i]).collect();
            !chosen.iter().tuple_combinations().any(|(&a, &b, &c)| is_set(a, b, c))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Every set among the square's nine cards, found by checking all 84
/// triples.
pub fn sets_within(sq: &MagicSquare) -> Vec<SetTriple> {
    sq.cards()
        .iter()
        .tuple_combinations()
        .filter_map(|(&a, &b, &c)| SetTriple::new(a, b, c).ok())
        .sorted()
        .collect()
}
