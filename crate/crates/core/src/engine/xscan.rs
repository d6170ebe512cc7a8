use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::fermat::check_domain;
use super::kernel::{run_scan, Scan, ScanEnd};
use super::state::XScanState;
use super::{Budget, FactorOutcome};
use crate::error::Result;
use crate::numeric::{ceil_sqrt, is_perfect_square};

/// Offset `k` at which the Fermat walk would see the half-gap `x`: if
/// `n + x²` is a square `s²` with `s ≥ ⌈√n⌉`, then `k = s − ⌈√n⌉` and
/// `(y0 + k)² − n = x²`. Otherwise `None`.
pub fn predict_k(n: &BigUint, x: &BigUint) -> Option<BigUint> {
    let s = is_perfect_square(&(n + x * x)).into_root()?;
    let y0 = ceil_sqrt(n);
    (s >= y0).then(|| s - y0)
}

pub fn init_xscan(n: &BigUint) -> Result<XScanState> {
    check_domain(n)?;
    Ok(XScanState::new(n.clone(), 0))
}

/// Scans `x = 0, 1, 2, …` for the first `x` with `n + x²` a perfect square.
///
/// Finds the same pair as [`fermat_factor`](super::fermat_factor); the
/// iteration count here is the half-gap `x = (q − p)/2` rather than `k`.
pub fn xscan_factor(n: &BigUint, budget: &Budget) -> Result<FactorOutcome<XScanState>> {
    Ok(resume_xscan(init_xscan(n)?, budget))
}

pub fn resume_xscan(state: XScanState, budget: &Budget) -> FactorOutcome<XScanState> {
    let n = state.n();
    let x = state.x();
    // x = (n − 1)/2 is the trivial representation.
    let mut last = ((n - 1u32) >> 1u32).to_u64().unwrap_or(u64::MAX);
    if let Some(max) = budget.max_iterations {
        last = last.min(x.saturating_add(max));
    }
    let wide_x = BigUint::from(x);
    let value = n + &wide_x * &wide_x;
    let increment = (wide_x << 1u32) + 1u32;
    let (scan, end) = run_scan(Scan::new(value, increment, x), last, budget);
    match end {
        ScanEnd::Square(s) => {
            let p = &s - scan.index;
            if p.is_one() {
                return FactorOutcome::NoNontrivialFactor {
                    iterations: scan.index,
                };
            }
            // k ≤ x always, since s − x ≤ √n ≤ y0.
            let k = (&s - ceil_sqrt(n))
                .to_u64()
                .expect("offset is bounded by the half-gap");
            FactorOutcome::Found {
                q: s + scan.index,
                p,
                k,
                iterations: scan.index,
            }
        }
        ScanEnd::Exhausted => FactorOutcome::BudgetExhausted {
            iterations: scan.index,
            resume: XScanState::new(n.clone(), scan.index),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::fermat_factor;

    fn nat(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn predict_examples() {
        // 187 + 9 = 196 = 14²
        assert_eq!(predict_k(&nat(187), &nat(3)), Some(nat(0)));
        // 203 lies strictly between 14² and 15²
        assert_eq!(predict_k(&nat(187), &nat(4)), None);
        // 5959 + 441 = 6400 = 80², 80 − 78 = 2
        assert_eq!(predict_k(&nat(5959), &nat(21)), Some(nat(2)));
    }

    #[test]
    fn xscan_examples() {
        let unlimited = Budget::unlimited();
        let hit = |n: u64| match xscan_factor(&nat(n), &unlimited).unwrap() {
            FactorOutcome::Found { p, q, iterations, .. } => {
                (p.to_u64().unwrap(), q.to_u64().unwrap(), iterations)
            }
            other => panic!("{n}: {other:?}"),
        };
        assert_eq!(hit(187), (11, 17, 3));
        assert_eq!(hit(9), (3, 3, 0));
        // 21 + 4 = 25 = 5²
        assert_eq!(hit(21), (3, 7, 2));
    }

    #[test]
    fn xscan_prime_and_domain() {
        assert_eq!(
            xscan_factor(&nat(17), &Budget::unlimited()).unwrap(),
            FactorOutcome::NoNontrivialFactor { iterations: 8 }
        );
        assert!(xscan_factor(&nat(22), &Budget::unlimited()).is_err());
        assert!(xscan_factor(&nat(1), &Budget::unlimited()).is_err());
    }

    #[test]
    fn xscan_resume() {
        let out = xscan_factor(&nat(187), &Budget::iterations(2)).unwrap();
        let FactorOutcome::BudgetExhausted { iterations, resume } = out else {
            panic!("expected exhaustion");
        };
        assert_eq!(iterations, 2);
        assert_eq!(resume.to_string(), "method=xscan n=187 x=2");
        let done = resume_xscan(resume, &Budget::unlimited());
        assert_eq!(done, xscan_factor(&nat(187), &Budget::unlimited()).unwrap());
    }

    #[test]
    fn predicted_k_matches_fermat_offset() {
        for n in (9u64..20_000).step_by(2) {
            if let FactorOutcome::Found { p, q, k, .. } =
                fermat_factor(&nat(n), &Budget::unlimited()).unwrap()
            {
                let x: BigUint = (q - p) >> 1u32;
                assert_eq!(predict_k(&nat(n), &x), Some(nat(k)), "n = {n}");
            }
        }
    }
}
