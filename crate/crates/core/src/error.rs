use thiserror::Error;

use crate::card::Card;
use crate::square::ViolationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("card text must be 4 characters, got {0}")]
    CardLength(usize),

    #[error("invalid trit {found:?} at position {position} (expected 0, 1 or 2)")]
    CardDigit { position: usize, found: char },

    #[error("cards must be distinct, got {0} twice")]
    SameCards(Card),

    #[error("{0} {1} {2} is not a set")]
    NotASet(Card, Card, Card),

    #[error("a set needs 3 cards, got {0}")]
    SetLength(usize),

    #[error("order {0} is out of range")]
    OrderOutOfRange(u32),

    #[error("cannot build a square from corners: {0}")]
    Corners(&'static str),

    #[error("not a magic SET square: {0}")]
    InvalidSquare(ViolationReport),

    #[error("malformed square: {0}")]
    SquareFormat(String),

    #[error("malformed square type {0:?}; valid types are {1}")]
    SquareType(String, String),

    #[error("malformed group element {0:?}: {1}")]
    GroupElement(String, &'static str),

    #[error("triplet orders {0:?} are not admissible")]
    Inadmissible([u8; 4]),

    #[error("card {0} is not available")]
    IllegalMove(Card),

    #[error("the game is already over")]
    GameOver,

    #[error("wrong player to move")]
    WrongTurn,

    #[error("malformed transcript: {0}")]
    Transcript(String),

    #[error("unknown report format {0:?} (expected json or csv)")]
    UnknownFormat(String),
}
