//! Reproducible semiprimes with a controlled gap between the factors.
//!
//! Generation procedure for a bit size `b`, gap window `(lo, hi]` and seed
//! (the window is `(0, max_gap]` for [`generate`], or `{0}` when
//! `max_gap = 0`):
//!
//! 1. Seed a [`SplitMix64`] with the seed; let `h = ⌈b/2⌉`.
//! 2. Draw `h` random bits, set the top and bottom bit, and walk upward in
//!    steps of two to the first probable prime `p`. Retry if `p` outgrows
//!    `h` bits.
//! 3. Draw an offset uniformly in the window and walk upward from `p` plus
//!    that offset to the window's top looking for a prime `q`, then wrap to
//!    the window's bottom. Retry if the window holds no prime.
//! 4. Retry unless `n = p·q` has `b − 1`, `b` or `b + 1` bits.
//!
//! Each retry continues the same random stream. After
//! [`MAX_ATTEMPTS`] retries the spec is reported infeasible.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::is_probable_prime;
use crate::rng::SplitMix64;
use crate::serde_num;

/// Attempts before a spec is declared infeasible.
pub const MAX_ATTEMPTS: u32 = 100_000;

/// Extra Miller–Rabin rounds for candidates beyond the deterministic range.
pub const PRIMALITY_ROUNDS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiprimeSpec {
    /// Target bit length of `n`.
    pub bits: u32,
    /// Upper bound on `q − p`; zero forces `p = q`.
    pub max_gap: BigUint,
    pub seed: u64,
}

/// A generated `n = p·q`. Serializes with every field as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedSemiprime {
    #[serde(with = "serde_num::decimal")]
    pub p: BigUint,
    #[serde(with = "serde_num::decimal")]
    pub q: BigUint,
    #[serde(with = "serde_num::decimal")]
    pub n: BigUint,
    #[serde(with = "serde_num::decimal")]
    pub gap: BigUint,
    #[serde(with = "serde_num::u32_string")]
    pub bits: u32,
    #[serde(with = "serde_num::u64_string")]
    pub seed: u64,
}

impl fmt::Display for GeneratedSemiprime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} p={} q={} gap={} bits={} seed={}",
            self.n, self.p, self.q, self.gap, self.bits, self.seed
        )
    }
}

fn check_bits(bits: u32) -> Result<()> {
    if bits < 4 {
        return Err(Error::InvalidSpec(format!("bits must be >= 4, got {bits}")));
    }
    Ok(())
}

pub fn generate(spec: &SemiprimeSpec) -> Result<GeneratedSemiprime> {
    check_bits(spec.bits)?;
    generate_in_window(spec.bits, &BigUint::zero(), &spec.max_gap, spec.seed)
}

/// One semiprime per gap bound, the `i`-th with gap in
/// `[gaps[i-1] + 1, gaps[i]]` (or `[1, gaps[0]]`, or exactly 0 for a zero
/// bound) and seed `seed + i`. Entries fail independently.
pub fn gap_ladder(bits: u32, gaps: &[BigUint], seed: u64) -> Result<Vec<Result<GeneratedSemiprime>>> {
    check_bits(bits)?;
    if gaps.is_empty() {
        return Err(Error::InvalidSpec("gap ladder needs at least one gap".into()));
    }
    if gaps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec("gap ladder must be strictly ascending".into()));
    }
    Ok(gaps
        .iter()
        .enumerate()
        .map(|(i, bound)| {
            let floor = if i == 0 { BigUint::zero() } else { gaps[i - 1].clone() };
            generate_in_window(bits, &floor, bound, seed.wrapping_add(i as u64))
        })
        .collect())
}

fn next_probable_prime(mut v: BigUint) -> BigUint {
    if v.is_even() {
        v += 1u32;
    }
    while !is_probable_prime(&v, PRIMALITY_ROUNDS) {
        v += 2u32;
    }
    v
}

/// First prime in `[from, to]`, or `None`.
fn prime_in(from: &BigUint, to: &BigUint) -> Option<BigUint> {
    let mut v = from.clone();
    if v.is_even() {
        v += 1u32;
    }
    while &v <= to {
        if is_probable_prime(&v, PRIMALITY_ROUNDS) {
            return Some(v);
        }
        v += 2u32;
    }
    None
}

/// Gap constrained to `(floor, ceiling]`, or `{0}` when `ceiling` is zero.
fn generate_in_window(
    bits: u32,
    floor: &BigUint,
    ceiling: &BigUint,
    seed: u64,
) -> Result<GeneratedSemiprime> {
    let half = bits.div_ceil(2);
    let mut rng = SplitMix64::new(seed);
    let top_bit = BigUint::from(1u32) << (half - 1);
    for _ in 0..MAX_ATTEMPTS {
        let start = rng.next_bits(half) | &top_bit | BigUint::from(1u32);
        let p = next_probable_prime(start);
        if p.bits() > u64::from(half) {
            continue;
        }
        let q = if ceiling.is_zero() {
            p.clone()
        } else {
            let lo = &p + floor + 1u32;
            let hi = &p + ceiling;
            let pick = &lo + rng.below(&(&hi - &lo + 1u32));
            let found = prime_in(&pick, &hi).or_else(|| {
                if pick > lo {
                    prime_in(&lo, &(&pick - 1u32))
                } else {
                    None
                }
            });
            match found {
                Some(q) => q,
                None => continue,
            }
        };
        let n = &p * &q;
        if n.bits().abs_diff(u64::from(bits)) > 1 {
            continue;
        }
        return Ok(GeneratedSemiprime {
            gap: &q - &p,
            p,
            q,
            n,
            bits,
            seed,
        });
    }
    Err(Error::Infeasible {
        bits,
        min_gap: if ceiling.is_zero() { BigUint::zero() } else { floor + 1u32 },
        max_gap: ceiling.clone(),
        attempts: MAX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn spec(bits: u32, max_gap: u64, seed: u64) -> SemiprimeSpec {
        SemiprimeSpec {
            bits,
            max_gap: BigUint::from(max_gap),
            seed,
        }
    }

    fn trial_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    fn check(g: &GeneratedSemiprime, max_gap: u64) {
        let p = g.p.to_u64().unwrap();
        let q = g.q.to_u64().unwrap();
        assert!(p <= q);
        assert!(trial_prime(p) && trial_prime(q), "{g}");
        assert_eq!(g.n, &g.p * &g.q);
        assert_eq!(g.gap, BigUint::from(q - p));
        assert!(q - p <= max_gap);
        assert!(g.n.bits().abs_diff(u64::from(g.bits)) <= 1, "{g}");
    }

    #[test]
    fn zero_gap_gives_square() {
        for seed in 0..20 {
            let g = generate(&spec(8, 0, seed)).unwrap();
            assert_eq!(g.p, g.q);
            check(&g, 0);
        }
    }

    #[test]
    fn eight_bit_gap_four_lands_in_enumerated_set() {
        // Every admissible pair, by enumeration: p, q prime, 0 < q − p ≤ 4,
        // p with 4 bits and p·q with 7 to 9 bits.
        let admissible: Vec<(u64, u64)> = (8u64..16)
            .filter(|&p| trial_prime(p))
            .flat_map(|p| (p + 1..=p + 4).map(move |q| (p, q)))
            .filter(|&(p, q)| trial_prime(q) && (7..=9).contains(&(64 - (p * q).leading_zeros())))
            .collect();
        assert_eq!(admissible, vec![(11, 13), (13, 17)]);
        for seed in 0..50 {
            let g = generate(&spec(8, 4, seed)).unwrap();
            check(&g, 4);
            let pair = (g.p.to_u64().unwrap(), g.q.to_u64().unwrap());
            assert!(admissible.contains(&pair), "{pair:?}");
        }
    }

    #[test]
    fn sixteen_bit_gap_two_is_twin_product() {
        for seed in 0..20 {
            let g = generate(&spec(16, 2, seed)).unwrap();
            check(&g, 2);
            assert_eq!(g.gap, BigUint::from(2u32));
        }
    }

    #[test]
    fn smallest_size() {
        let g = generate(&spec(4, 0, 1)).unwrap();
        assert_eq!(g.n, BigUint::from(9u32));
        let g = generate(&spec(4, 2, 1)).unwrap();
        assert_eq!(g.n, BigUint::from(15u32));
        assert!(generate(&spec(3, 2, 1)).is_err());
    }

    #[test]
    fn infeasible_window_is_reported() {
        // No odd prime pair differs by exactly 1.
        let err = gap_ladder(16, &[BigUint::from(0u32), BigUint::from(1u32)], 5).unwrap();
        assert!(err[0].is_ok());
        assert!(matches!(err[1], Err(Error::Infeasible { .. })));
    }

    #[test]
    fn deterministic_per_seed() {
        for (bits, gap) in [(8, 4), (16, 2), (24, 100), (32, 1000), (48, 0), (64, 1 << 20), (96, 50), (128, 1000), (20, 6), (40, 30)] {
            for seed in [0u64, 7, u64::MAX] {
                let a = generate(&spec(bits, gap, seed)).unwrap();
                let b = generate(&spec(bits, gap, seed)).unwrap();
                assert_eq!(a, b);
                assert!(a.gap <= BigUint::from(gap));
                assert!(a.n.bits().abs_diff(u64::from(bits)) <= 1);
            }
        }
    }

    #[test]
    fn small_outputs_are_trial_division_prime() {
        for bits in 4..=32 {
            for seed in 0..10 {
                let g = generate(&spec(bits, 64, seed)).unwrap();
                check(&g, 64);
            }
        }
    }

    #[test]
    fn ladder_gaps_increase() {
        let gaps: Vec<BigUint> = [2u32, 100, 10_000].map(BigUint::from).to_vec();
        let ladder = gap_ladder(32, &gaps, 42).unwrap();
        let ladder: Vec<_> = ladder.into_iter().map(Result::unwrap).collect();
        for g in &ladder {
            check(g, 10_000);
        }
        assert_eq!(ladder[0].gap, BigUint::from(2u32));
        assert!(ladder[0].gap < ladder[1].gap && ladder[1].gap < ladder[2].gap);
        assert!(ladder[1].gap > BigUint::from(2u32) && ladder[2].gap > BigUint::from(100u32));

        let square = gap_ladder(32, &[BigUint::zero()], 1).unwrap();
        let g = square[0].as_ref().unwrap();
        assert_eq!(g.p, g.q);

        assert!(gap_ladder(32, &[], 1).is_err());
        assert!(gap_ladder(32, &gaps.iter().rev().cloned().collect::<Vec<_>>(), 1).is_err());
    }

    #[test]
    fn json_fields_are_decimal_strings() {
        let g = generate(&spec(16, 2, 3)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&g).unwrap();
        for key in ["p", "q", "n", "gap", "bits", "seed"] {
            assert!(v[key].is_string(), "{key}");
        }
        let back: GeneratedSemiprime = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
    }
}
