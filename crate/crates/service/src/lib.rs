//! Command-line and HTTP front ends for the `setsquare` library.

pub mod api;
pub mod commands;
pub mod error;
pub mod generate;
pub mod play;
pub mod session;

pub use error::{Result, ServiceError};
