//! Fermat-style difference-of-squares factorization for semiprimes.
//!
//! * [`numeric`]: integer square roots, perfect-square detection, primality.
//! * [`engine`]: the Fermat recurrence walk, the x-scan and `k` prediction,
//!   all budgeted and resumable.
//! * [`lab`]: reproducible semiprimes with a controlled prime gap.
//! * [`bench`]: iteration/time measurements and the gap-scaling summary.
//! * [`cli`]: the `sqfactor` command line.

pub mod bench;
pub mod cli;
pub mod engine;
pub mod error;
pub mod lab;
pub mod numeric;
pub mod rng;
mod serde_num;

pub use engine::{
    fermat_factor, init_search, normalize_input, predict_k, resume_fermat, resume_xscan,
    xscan_factor, Budget, Checkpoint, FactorOutcome, Method, Normalized, OutcomeKind, SearchState,
    XScanState,
};
pub use error::{Error, Result};
pub use lab::{gap_ladder, generate, GeneratedSemiprime, SemiprimeSpec};
pub use numeric::{
    ceil_sqrt, floor_sqrt, is_perfect_square, is_probable_prime, residue_filter, Modulus, Natural,
    SquareTest,
};
