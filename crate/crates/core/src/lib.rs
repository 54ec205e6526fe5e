//! Combinatorics of magic SET squares.
//!
//! Cards are points of F₃⁴ ([`card`]); a magic SET square is a 3×3 grid of
//! cards whose twelve lines, including broken diagonals, are all sets
//! ([`square`]). The [`census`] module enumerates and classifies all 505440
//! squares, [`symmetry`] implements the 31104-element group of feature and
//! value shuffles together with the geometric rearrangements of a grid, and
//! [`game`] plays and solves SET tic-tac-toe.

pub mod card;
pub mod census;
pub mod error;
pub mod game;
pub mod square;
pub mod symmetry;
pub mod verify;

pub use card::{Card, Feature, SetTriple, Trit};
pub use error::{Error, Result};
pub use square::{Family, GridPos, MagicSquare, OrderTuple, SquareProfile, SquareType, Support};
