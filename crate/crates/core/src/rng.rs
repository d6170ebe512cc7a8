//! SplitMix64, the generator behind every seeded choice in this crate.
//!
//! The algorithm is small enough to reimplement bit-for-bit in any language:
//!
//! ```text
//! state  = state + 0x9E3779B97F4A7C15            (mod 2^64)
//! z      = state
//! z      = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2^64)
//! z      = (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2^64)
//! output = z ^ (z >> 31)
//! ```

use num_bigint::BigUint;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
        z ^ (z >> 31)
    }

    /// Uniform-ish integer with exactly `bits` random low bits, drawn from
    /// `ceil(bits / 64)` outputs, least significant word first.
    pub fn next_bits(&mut self, bits: u32) -> BigUint {
        let words = bits.div_ceil(64) as usize;
        let mut digits: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
        let spare = words as u32 * 64 - bits;
        if let Some(top) = digits.last_mut() {
            if spare > 0 {
                *top >>= spare;
            }
        }
        BigUint::from_slice(
            &digits
                .iter()
                .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                .collect::<Vec<_>>(),
        )
    }

    /// Value in `[0, bound)`; `bound` must be nonzero. Reduces a draw that is
    /// 64 bits wider than `bound`, so the modulo bias is below 2^-64.
    pub fn below(&mut self, bound: &BigUint) -> BigUint {
        let wide = self.next_bits(bound.bits() as u32 + 64);
        wide % bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_reference_outputs() {
        // First outputs of the reference SplitMix64 seeded with 0 and 1234567.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        let mut rng = SplitMix64::new(1234567);
        assert_eq!(rng.next_u64(), 6457827717110365317);
        assert_eq!(rng.next_u64(), 3203168211198807973);
    }

    #[test]
    fn next_bits_respects_width() {
        let mut rng = SplitMix64::new(7);
        for bits in [1u32, 5, 63, 64, 65, 127, 200] {
            for _ in 0..50 {
                assert!(rng.next_bits(bits).bits() <= u64::from(bits));
            }
        }
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = SplitMix64::new(99);
        let bound = BigUint::from(1_000_003u32);
        for _ in 0..1000 {
            assert!(rng.below(&bound) < bound);
        }
    }
}
