use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The search engine only accepts odd moduli of at least 3.
    #[error("modulus {0} is outside the engine domain: it must be odd and >= 3")]
    EngineDomain(BigUint),

    #[error("cannot normalize {0}: input must be >= 2")]
    TooSmall(BigUint),

    #[error("malformed modulus {input:?}: {reason}")]
    MalformedModulus { input: String, reason: &'static str },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("invalid semiprime spec: {0}")]
    InvalidSpec(String),

    #[error("no semiprime with {bits} bits and gap in [{min_gap}, {max_gap}] found after {attempts} attempts")]
    Infeasible {
        bits: u32,
        min_gap: BigUint,
        max_gap: BigUint,
        attempts: u32,
    },

    #[error("cannot summarize: {0}")]
    Summary(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
