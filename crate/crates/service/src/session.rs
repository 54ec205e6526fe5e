//! Game sessions between a human and the engine.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use setsquare::game::{strategy_move_with, GameState, Player, Solver};
use setsquare::{Card, MagicSquare};
use uuid::Uuid;

use crate::error::{Result, ServiceError};

pub struct Session {
    pub state: GameState,
    pub engine: Player,
    pub created_at: Instant,
    last_used: Instant,
    solver: Solver,
}

impl Session {
    pub fn new(pool: MagicSquare, engine: Player) -> Session {
        let now = Instant::now();
        Session { state: GameState::new(pool), engine, created_at: now, last_used: now, solver: Solver::new(pool) }
    }

    pub fn human(&self) -> Player {
        self.engine.other()
    }

    /// The engine's choice in the current position. As first player it
    /// follows the complete/block strategy; as second it plays perfectly.
    pub fn engine_choice(&mut self) -> Result<Card> {
        match self.engine {
            Player::First => Ok(strategy_move_with(&mut self.solver, &self.state)?),
            Player::Second => Ok(self.solver.solve(&self.state)?.best_move),
        }
    }

    /// Plays engine moves until the human is to move or the game ends.
    pub fn engine_reply(&mut self) -> Result<Vec<Card>> {
        let mut played = Vec::new();
        while !self.state.is_over() && self.state.to_move() == self.engine {
            let card = self.engine_choice()?;
            self.state = self.state.apply_move(card)?;
            played.push(card);
        }
        Ok(played)
    }

    /// Applies the human's move, then the engine's answer.
    pub fn human_move(&mut self, card: Card) -> Result<Vec<Card>> {
        if self.state.is_over() {
            return Err(setsquare::Error::GameOver.into());
        }
        if self.state.to_move() != self.human() {
            return Err(setsquare::Error::WrongTurn.into());
        }
        self.state = self.state.apply_move(card)?;
        self.engine_reply()
    }
}

type Shared = Arc<Mutex<Session>>;

/// Sessions by id. Each session has its own lock so games proceed
/// independently; idle sessions are dropped by [`SessionStore::purge`].
pub struct SessionStore {
    sessions: Mutex<HashMap<Uuid, Shared>>,
    idle_timeout: Duration,
}

impl SessionStore {
    pub fn new(idle_timeout: Duration) -> SessionStore {
        SessionStore { sessions: Mutex::new(HashMap::new()), idle_timeout }
    }

    pub fn idle_timeout(&self) -> Duration {
        self.idle_timeout
    }

    pub fn insert(&self, session: Session) -> Uuid {
        let id = Uuid::new_v4();
        self.sessions.lock().expect("session map").insert(id, Arc::new(Mutex::new(session)));
        id
    }

    /// Runs `f` on the session under its lock.
    pub fn with<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
        let unknown = || ServiceError::UnknownGame(id.to_string());
        let key = Uuid::parse_str(id).map_err(|_| unknown())?;
        let shared = self.sessions.lock().expect("session map").get(&key).cloned().ok_or_else(unknown)?;
        let mut session = shared.lock().expect("session");
        session.last_used = Instant::now();
        f(&mut session)
    }

    /// Drops sessions idle for longer than the timeout; returns how many.
    pub fn purge(&self, now: Instant) -> usize {
        let mut map = self.sessions.lock().expect("session map");
        let before = map.len();
        map.retain(|_, s| match s.try_lock() {
            Ok(s) => now.saturating_duration_since(s.last_used) <= self.idle_timeout,
            Err(_) => true,
        });
        before - map.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session map").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool() -> MagicSquare {
        "1111 0101 2121 1010 0000 2020 1212 0202 2222".parse().unwrap()
    }

    #[test]
    fn engine_opens_when_first() {
        let mut s = Session::new(pool(), Player::First);
        assert_eq!(s.engine_reply().unwrap().len(), 1);
        assert_eq!(s.state.to_move(), Player::Second);
    }

    #[test]
    fn human_cannot_move_twice_or_take_claimed_cards() {
        let mut s = Session::new(pool(), Player::First);
        let opening = s.engine_reply().unwrap()[0];
        assert_eq!(s.human_move(opening).unwrap_err().code(), "illegal_move");
        let free = s.state.legal_moves()[0];
        s.human_move(free).unwrap();
        assert_eq!(s.state.to_move(), Player::Second);
    }

    #[test]
    fn idle_sessions_are_purged() {
        let store = SessionStore::new(Duration::from_secs(60));
        let id = store.insert(Session::new(pool(), Player::Second));
        assert_eq!(store.purge(Instant::now()), 0);
        assert_eq!(store.purge(Instant::now() + Duration::from_secs(61)), 1);
        assert!(store.is_empty());
        assert_eq!(store.with(&id.to_string(), |_| Ok(())).unwrap_err().code(), "unknown_game");
    }
}
