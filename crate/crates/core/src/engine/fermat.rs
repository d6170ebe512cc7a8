use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::kernel::{run_scan, Scan, ScanEnd};
use super::state::SearchState;
use super::{Budget, FactorOutcome};
use crate::error::{Error, Result};
use crate::numeric::ceil_sqrt;

pub(crate) fn check_domain(n: &BigUint) -> Result<()> {
    if *n < BigUint::from(3u32) || n.is_even() {
        return Err(Error::EngineDomain(n.clone()));
    }
    Ok(())
}

/// Largest offset worth visiting: `y0 + k = (n + 1) / 2` is the trivial
/// representation `n = ((n+1)/2)² − ((n−1)/2)²`, always a square hit.
fn last_offset(n: &BigUint, y0: &BigUint) -> u64 {
    let top: BigUint = (n + 1u32) >> 1u32;
    (top - y0).to_u64().unwrap_or(u64::MAX)
}

/// Starting state `k = 0`, `y0 = ⌈√n⌉`, `d = y0² − n`.
pub fn init_search(n: &BigUint) -> Result<SearchState> {
    check_domain(n)?;
    let y0 = ceil_sqrt(n);
    let d = &y0 * &y0 - n;
    Ok(SearchState::from_parts(n.clone(), y0, 0, d))
}

impl SearchState {
    /// One step of the recurrence `D_{k+1} = D_k + 2·y0 + 2k + 1`.
    pub fn step(&self) -> SearchState {
        let increment = (self.y() << 1u32) + 1u32;
        SearchState::from_parts(
            self.n().clone(),
            self.y0().clone(),
            self.k() + 1,
            self.d() + increment,
        )
    }
}

/// Fermat's walk from `y0 = ⌈√n⌉` upward until `y² − n` is a square.
///
/// The first hit gives the factor pair with the largest `p ≤ √n`. A hit
/// with `p = 1` means `n` has no nontrivial split, i.e. it is prime.
pub fn fermat_factor(n: &BigUint, budget: &Budget) -> Result<FactorOutcome<SearchState>> {
    Ok(resume_fermat(init_search(n)?, budget))
}

/// Continues a walk from `state`. The budget counts iterations taken by this
/// call; the reported iteration count is cumulative (always equal to `k`).
pub fn resume_fermat(state: SearchState, budget: &Budget) -> FactorOutcome<SearchState> {
    let k = state.k();
    let mut last = last_offset(state.n(), state.y0());
    if let Some(max) = budget.max_iterations {
        last = last.min(k.saturating_add(max));
    }
    let increment = (state.y() << 1u32) + 1u32;
    let (n, y0, _, d) = state.into_parts();
    let (scan, end) = run_scan(Scan::new(d, increment, k), last, budget);
    match end {
        ScanEnd::Square(x) => {
            let y = &y0 + scan.index;
            let p = &y - &x;
            if p.is_one() {
                FactorOutcome::NoNontrivialFactor {
                    iterations: scan.index,
                }
            } else {
                FactorOutcome::Found {
                    q: y + x,
                    p,
                    k: scan.index,
                    iterations: scan.index,
                }
            }
        }
        ScanEnd::Exhausted => FactorOutcome::BudgetExhausted {
            iterations: scan.index,
            resume: SearchState::from_parts(n, y0, scan.index, scan.value),
        },
    }
}
