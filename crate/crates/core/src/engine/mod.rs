//! Difference-of-squares search for a factor pair of an odd modulus.
//!
//! Two directions over the same representation `n = y² − x²`:
//!
//! * [`fermat_factor`] walks the centre `y = y0 + k` upward from
//!   `y0 = ⌈√n⌉`, carrying the deficit `D_k = y² − n` by the recurrence
//!   `D_{k+1} = D_k + 2·y0 + 2k + 1` and stopping when it is a square `x²`.
//! * [`xscan_factor`] walks the half-gap `x` upward from zero and asks
//!   whether `n + x²` is a square; [`predict_k`] turns a hit into the offset
//!   `k` the Fermat walk would have needed.
//!
//! Both return the pair `p = y − x`, `q = y + x` with the largest `p ≤ √n`.
//! Every search runs under a [`Budget`] and can be checkpointed and resumed.

mod fermat;
mod kernel;
mod normalize;
mod state;
mod xscan;

use std::time::Duration;

use num_bigint::BigUint;

pub use fermat::{fermat_factor, init_search, resume_fermat};
pub use normalize::{normalize_input, Normalized};
pub use state::{Checkpoint, SearchState, XScanState};
pub use xscan::{init_xscan, predict_k, resume_xscan, xscan_factor};

/// Iteration budget used by the command line when none is given.
pub const DEFAULT_CLI_MAX_ITERATIONS: u64 = 100_000_000;

/// Bounds on a single search call. `None` means unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_iterations: Option<u64>,
    pub max_elapsed: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn iterations(max: u64) -> Self {
        Budget {
            max_iterations: Some(max),
            max_elapsed: None,
        }
    }

    pub fn with_elapsed(self, max: Duration) -> Self {
        Budget {
            max_elapsed: Some(max),
            ..self
        }
    }

    pub fn is_unlimited(&self) -> bool {
        self.max_iterations.is_none() && self.max_elapsed.is_none()
    }
}

/// Result of a search. `S` is the resumable state of the method that ran.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOutcome<S> {
    /// `p · q = n` with `1 < p ≤ q`, found at centre `y0 + k`.
    Found {
        p: BigUint,
        q: BigUint,
        k: u64,
        iterations: u64,
    },
    /// The first square hit was the trivial representation `1 · n`.
    NoNontrivialFactor { iterations: u64 },
    /// The budget ran out; `resume` continues exactly where the search stopped.
    BudgetExhausted { iterations: u64, resume: S },
}

impl<S> FactorOutcome<S> {
    pub fn iterations(&self) -> u64 {
        match self {
            FactorOutcome::Found { iterations, .. }
            | FactorOutcome::NoNontrivialFactor { iterations }
            | FactorOutcome::BudgetExhausted { iterations, .. } => *iterations,
        }
    }

    /// The factor pair, if one was found.
    pub fn pair(&self) -> Option<(&BigUint, &BigUint)> {
        match self {
            FactorOutcome::Found { p, q, .. } => Some((p, q)),
            _ => None,
        }
    }

    pub fn kind(&self) -> OutcomeKind {
        match self {
            FactorOutcome::Found { .. } => OutcomeKind::Found,
            FactorOutcome::NoNontrivialFactor { .. } => OutcomeKind::NoFactor,
            FactorOutcome::BudgetExhausted { .. } => OutcomeKind::BudgetExhausted,
        }
    }

    pub fn map_resume<T>(self, f: impl FnOnce(S) -> T) -> FactorOutcome<T> {
        match self {
            FactorOutcome::Found {
                p,
                q,
                k,
                iterations,
            } => FactorOutcome::Found {
                p,
                q,
                k,
                iterations,
            },
            FactorOutcome::NoNontrivialFactor { iterations } => {
                FactorOutcome::NoNontrivialFactor { iterations }
            }
            FactorOutcome::BudgetExhausted { iterations, resume } => FactorOutcome::BudgetExhausted {
                iterations,
                resume: f(resume),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Found,
    NoFactor,
    BudgetExhausted,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Found => "found",
            OutcomeKind::NoFactor => "no_factor",
            OutcomeKind::BudgetExhausted => "budget_exhausted",
        }
    }
}

/// Which search direction produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fermat,
    Xscan,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fermat => "fermat",
            Method::Xscan => "xscan",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fermat" => Ok(Method::Fermat),
            "xscan" => Ok(Method::Xscan),
            other => Err(format!("unknown method {other:?} (expected fermat or xscan)")),
        }
    }
}
