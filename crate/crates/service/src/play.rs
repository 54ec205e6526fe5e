//! Interactive game on a terminal (or any reader/writer pair).

use std::io::{self, BufRead, Write};

use setsquare::game::{GameState, Player, Status};
use setsquare::{Card, GridPos, MagicSquare};

use crate::session::Session;

/// Prints the grid with a claim marker after each card: `.` free,
/// `Y` yours, `E` the engine's.
pub fn render(session: &Session, out: &mut impl Write) -> io::Result<()> {
    let state = &session.state;
    let mine = state.claimed_by(session.human());
    let theirs = state.claimed_by(session.engine);
    for row in 0..3 {
        let cells: Vec<String> = (0..3)
            .map(|col| {
                let card = state.pool().get(GridPos::new(row, col));
                let mark = if mine.contains(&card) {
                    'Y'
                } else if theirs.contains(&card) {
                    'E'
                } else {
                    '.'
                };
                format!("{card} {mark}")
            })
            .collect();
        writeln!(out, "  {}", cells.join("   "))?;
    }
    Ok(())
}

fn announce(session: &Session, out: &mut impl Write) -> io::Result<()> {
    let state: &GameState = &session.state;
    if let Status::Won { player, line } = state.status() {
        let who = if player == session.engine { "The engine wins" } else { "You win" };
        writeln!(
            out,
            "{who} with {line} (a set of order {}) after {} picks.",
            line.order(),
            state.picks(player)
        )?;
    }
    writeln!(out, "transcript: {}", state.transcript())
}

/// Plays one game; the human reads from `input`. Unparseable or illegal
/// input is reported and asked again without changing the position.
/// Returns the final (or, if input ends early, the last) position.
pub fn play(mut input: impl BufRead, out: &mut impl Write, pool: MagicSquare, human: Player) -> io::Result<GameState> {
    let mut session = Session::new(pool, human.other());
    writeln!(out, "You play {}. Pick a card by typing it, e.g. {}.", human, pool.cards()[0])?;
    let mut replies = session.engine_reply().map_err(io::Error::other)?;
    loop {
        for card in replies.drain(..) {
            writeln!(out, "engine takes {card}")?;
        }
        render(&session, out)?;
        if session.state.is_over() {
            announce(&session, out)?;
            return Ok(session.state);
        }
        let mut line = String::new();
        loop {
            write!(out, "your card> ")?;
            out.flush()?;
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                writeln!(out, "input ended; transcript: {}", session.state.transcript())?;
                return Ok(session.state);
            }
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            match text.parse::<Card>().map_err(Into::into).and_then(|card| session.human_move(card)) {
                Ok(engine_moves) => {
                    replies = engine_moves;
                    break;
                }
                Err(e) => writeln!(out, "{e}; try again")?,
            }
        }
    }
}
