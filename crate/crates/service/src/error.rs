use thiserror::Error;

use setsquare::square::ViolationReport;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Domain(#[from] setsquare::Error),

    #[error("order {order} does not match type {square_type} (order {expected})")]
    Inconsistent { square_type: String, order: u8, expected: u8 },

    #[error("unknown game {0}")]
    UnknownGame(String),

    #[error("malformed request: {0}")]
    BadRequest(String),
}

impl ServiceError {
    /// Stable identifier for clients.
    pub fn code(&self) -> &'static str {
        use setsquare::Error as E;
        match self {
            ServiceError::Domain(e) => match e {
                E::CardLength(_) | E::CardDigit { .. } => "malformed_card",
                E::SameCards(_) | E::NotASet(..) | E::SetLength(_) => "malformed_set",
                E::InvalidSquare(_) => "not_magic",
                E::SquareFormat(_) | E::Corners(_) => "malformed_square",
                E::SquareType(..) | E::Inadmissible(_) => "unknown_type",
                E::OrderOutOfRange(_) => "bad_order",
                E::GroupElement(..) => "malformed_group_element",
                E::IllegalMove(_) => "illegal_move",
                E::GameOver => "game_over",
                E::WrongTurn => "wrong_turn",
                E::Transcript(_) => "malformed_transcript",
                E::UnknownFormat(_) => "unknown_format",
            },
            ServiceError::Inconsistent { .. } => "inconsistent_request",
            ServiceError::UnknownGame(_) => "unknown_game",
            ServiceError::BadRequest(_) => "bad_request",
        }
    }

    pub fn violations(&self) -> Option<&ViolationReport> {
        match self {
            ServiceError::Domain(setsquare::Error::InvalidSquare(report)) => Some(report),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ServiceError>;
