use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Input after all factors of two have been divided out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    /// The input was a power of two, `2^twos`.
    Complete { twos: u32 },
    /// `n = 2^twos · residual` with `residual` odd and at least 3.
    Odd { twos: u32, residual: BigUint },
}

impl Normalized {
    pub fn twos(&self) -> u32 {
        match self {
            Normalized::Complete { twos } | Normalized::Odd { twos, .. } => *twos,
        }
    }
}

/// Strips factors of two so that the engine only ever sees odd moduli.
pub fn normalize_input(n: &BigUint) -> Result<Normalized> {
    if *n < BigUint::from(2u32) {
        return Err(Error::TooSmall(n.clone()));
    }
    let twos = n.trailing_zeros().expect("n is nonzero") as u32;
    let residual = n >> twos;
    Ok(if residual.is_one() {
        Normalized::Complete { twos }
    } else {
        Normalized::Odd { twos, residual }
    })
}
