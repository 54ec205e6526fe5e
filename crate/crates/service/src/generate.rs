//! Seeded random squares with an optional type or order constraint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use setsquare::{Card, MagicSquare, SquareType};

use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerationRequest {
    pub square_type: Option<SquareType>,
    pub order: Option<u8>,
    pub seed: Option<u64>,
}

impl GenerationRequest {
    pub fn check(&self) -> Result<()> {
        if let Some(order) = self.order {
            if !(2..=4).contains(&order) {
                return Err(setsquare::Error::OrderOutOfRange(order.into()).into());
            }
            if let Some(ty) = self.square_type {
                if ty.order() != order {
                    return Err(ServiceError::Inconsistent {
                        square_type: ty.to_string(),
                        order,
                        expected: ty.order(),
                    });
                }
            }
        }
        Ok(())
    }

    fn accepts(&self, sq: &MagicSquare) -> bool {
        let profile = sq.profile();
        self.square_type.is_none_or(|ty| profile.square_type == ty)
            && self.order.is_none_or(|k| profile.order == k)
    }
}

/// Draws corner triples until the square matches the request. Every type
/// covers at least 3888 of 531441 corner triples, so this ends quickly.
pub fn generate(req: &GenerationRequest) -> Result<(MagicSquare, u64)> {
    req.check()?;
    let seed = req.seed.unwrap_or_else(rand::random);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut card = || Card::from_index(rng.random_range(0..81));
    loop {
        let (a, b, c) = (card(), card(), card());
        if let Ok(sq) = MagicSquare::build_from_corners(a, b, c) {
            if req.accepts(&sq) {
                return Ok((sq, seed));
            }
        }
    }
}
