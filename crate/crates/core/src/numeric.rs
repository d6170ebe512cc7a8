//! Integer square roots, perfect-square detection and primality on
//! arbitrary-precision naturals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::rng::SplitMix64;

/// Arbitrary-precision nonnegative integer.
pub type Natural = BigUint;

/// Product of the residue-filter moduli 64 · 63 · 65 · 11. A single reduction
/// modulo this value yields every residue the filter inspects.
pub const RESIDUE_MODULUS: u32 = 64 * 63 * 65 * 11;

const fn square_residues<const M: usize>() -> [bool; M] {
    let mut table = [false; M];
    let mut i = 0;
    while i < M {
        table[(i * i) % M] = true;
        i += 1;
    }
    table
}

static SQUARES_MOD_64: [bool; 64] = square_residues::<64>();
static SQUARES_MOD_63: [bool; 63] = square_residues::<63>();
static SQUARES_MOD_65: [bool; 65] = square_residues::<65>();
static SQUARES_MOD_11: [bool; 11] = square_residues::<11>();

/// Residue filter applied to `n mod RESIDUE_MODULUS`.
#[inline]
pub(crate) fn residue_passes(r: u32) -> bool {
    SQUARES_MOD_64[(r & 63) as usize]
        && SQUARES_MOD_63[(r % 63) as usize]
        && SQUARES_MOD_65[(r % 65) as usize]
        && SQUARES_MOD_11[(r % 11) as usize]
}

/// `n mod m` for a small modulus without allocating.
pub(crate) fn small_mod(n: &BigUint, m: u32) -> u32 {
    let m = u128::from(m);
    let r = n
        .iter_u64_digits()
        .rev()
        .fold(0u128, |acc, digit| ((acc << 64) | u128::from(digit)) % m);
    r as u32
}

/// Fast rejection of non-squares by their residues modulo 64, 63, 65 and 11.
///
/// `false` is a proof that `n` is not a square; `true` is inconclusive.
pub fn residue_filter(n: &BigUint) -> bool {
    residue_passes(small_mod(n, RESIDUE_MODULUS))
}

/// `⌊√n⌋` by Newton's method, started from `2^⌈bits/2⌉ ≥ √n` so that the
/// iterates decrease monotonically onto the floor root.
pub fn floor_sqrt(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let mut x = BigUint::one() << n.bits().div_ceil(2);
    loop {
        let next = (&x + n / &x) >> 1u32;
        if next >= x {
            return x;
        }
        x = next;
    }
}

/// Smallest `r` with `r² ≥ n`.
pub fn ceil_sqrt(n: &BigUint) -> BigUint {
    let r = floor_sqrt(n);
    if &(&r * &r) == n {
        r
    } else {
        r + 1u32
    }
}

/// Outcome of an exact perfect-square test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareTest {
    Square(BigUint),
    NonSquare,
}

impl SquareTest {
    pub fn is_square(&self) -> bool {
        matches!(self, SquareTest::Square(_))
    }

    pub fn root(&self) -> Option<&BigUint> {
        match self {
            SquareTest::Square(r) => Some(r),
            SquareTest::NonSquare => None,
        }
    }

    pub fn into_root(self) -> Option<BigUint> {
        match self {
            SquareTest::Square(r) => Some(r),
            SquareTest::NonSquare => None,
        }
    }
}

/// Exact perfect-square test: residue filter first, then `⌊√n⌋² = n`.
pub fn is_perfect_square(n: &BigUint) -> SquareTest {
    if !residue_filter(n) {
        return SquareTest::NonSquare;
    }
    exact_root(n).map_or(SquareTest::NonSquare, SquareTest::Square)
}

/// Root of `n` if it is a perfect square, skipping the residue filter.
pub(crate) fn exact_root(n: &BigUint) -> Option<BigUint> {
    let r = floor_sqrt(n);
    (&(&r * &r) == n).then_some(r)
}

pub(crate) fn exact_root_u128(n: u128) -> Option<u128> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Bases that make Miller–Rabin exact below [`DETERMINISTIC_BOUND`].
pub const WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// 3 317 044 064 679 887 385 961 981: the first strong pseudoprime to every
/// base in [`WITNESSES`].
pub const DETERMINISTIC_BOUND: &str = "3317044064679887385961981";

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Miller–Rabin primality test.
///
/// Exact for `n < 3.3 × 10^24` using the fixed [`WITNESSES`]. Above that,
/// `rounds` extra witnesses are drawn from a [`SplitMix64`] seeded by `n`
/// itself, so the answer is reproducible and a composite slips through with
/// probability at most `4^-rounds`.
pub fn is_probable_prime(n: &BigUint, rounds: u32) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_PRIMES {
        if small_mod(n, p) == 0 {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd_part = &n_minus_one >> shift;
    let composite_by = |base: &BigUint| -> bool {
        let mut x = base.modpow(&odd_part, n);
        if x.is_one() || x == n_minus_one {
            return false;
        }
        for _ in 1..shift {
            x = &x * &x % n;
            if x == n_minus_one {
                return false;
            }
            if x.is_one() {
                return true;
            }
        }
        true
    };

    if WITNESSES
        .iter()
        .any(|&w| composite_by(&BigUint::from(w)))
    {
        return false;
    }
    let bound: BigUint = DETERMINISTIC_BOUND.parse().expect("constant parses");
    if *n < bound {
        return true;
    }
    let seed = n.iter_u64_digits().fold(0u64, |acc, d| acc.rotate_left(7) ^ d);
    let mut rng = SplitMix64::new(seed);
    let span = n - 3u32;
    (0..rounds.max(1)).all(|_| !composite_by(&(rng.below(&span) + 2u32)))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for word-sized inputs.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = u64::from(p);
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let shift = (n - 1).trailing_zeros();
    let odd_part = (n - 1) >> shift;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(u64::from(w), odd_part, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..shift {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Radix a [`Modulus`] was written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Radix {
    Decimal,
    Hex,
}

/// A modulus as supplied by a user: the value plus the notation it came in.
/// A `0x`/`0X` prefix selects hexadecimal; anything else is decimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    pub value: BigUint,
    pub radix: Radix,
}

impl FromStr for Modulus {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let malformed = |reason| Error::MalformedModulus {
            input: input.to_owned(),
            reason,
        };
        let trimmed = input.trim();
        let (digits, radix) = match trimmed
            .strip_prefix("0x")
            .or_else(|| trimmed.strip_prefix("0X"))
        {
            Some(hex) => (hex, Radix::Hex),
            None => (trimmed, Radix::Decimal),
        };
        if digits.is_empty() {
            return Err(malformed("no digits"));
        }
        let valid = match radix {
            Radix::Decimal => digits.bytes().all(|b| b.is_ascii_digit()),
            Radix::Hex => digits.bytes().all(|b| b.is_ascii_hexdigit()),
        };
        if !valid {
            return Err(malformed(match radix {
                Radix::Decimal => "expected decimal digits or a 0x-prefixed hex number",
                Radix::Hex => "invalid hexadecimal digit",
            }));
        }
        let base = match radix {
            Radix::Decimal => 10,
            Radix::Hex => 16,
        };
        let value = BigUint::parse_bytes(digits.as_bytes(), base).ok_or(malformed("unparseable"))?;
        Ok(Modulus { value, radix })
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.radix {
            Radix::Decimal => write!(f, "{}", self.value),
            Radix::Hex => write!(f, "0x{:x}", self.value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn floor_sqrt_examples() {
        assert_eq!(floor_sqrt(&nat(187)), nat(13));
        assert_eq!(floor_sqrt(&nat(0)), nat(0));
        assert_eq!(floor_sqrt(&nat(1_000_000_000_000_000_000)), nat(1_000_000_000));
    }

    #[test]
    fn ceil_sqrt_examples() {
        assert_eq!(ceil_sqrt(&nat(187)), nat(14));
        assert_eq!(ceil_sqrt(&nat(196)), nat(14));
        // 77² = 5929 < 5959 ≤ 6084 = 78²
        assert_eq!(77 * 77, 5929);
        assert_eq!(78 * 78, 6084);
        assert_eq!(ceil_sqrt(&nat(5959)), nat(78));
    }

    #[test]
    fn floor_sqrt_exhaustive_to_a_million() {
        for n in 0..=1_000_000u64 {
            let r = floor_sqrt(&nat(n)).to_u64().unwrap();
            assert!(r * r <= n && n < (r + 1) * (r + 1), "n = {n}");
            let c = ceil_sqrt(&nat(n)).to_u64().unwrap();
            assert_eq!(c, r + u64::from(r * r != n), "n = {n}");
        }
    }

    #[test]
    fn floor_sqrt_matches_library_root_on_wide_values() {
        let mut rng = SplitMix64::new(3);
        for bits in [65u32, 128, 255, 256, 512, 2048, 4097] {
            for _ in 0..20 {
                let n = rng.next_bits(bits);
                assert_eq!(floor_sqrt(&n), n.sqrt());
            }
        }
    }

    #[test]
    fn perfect_square_examples() {
        assert_eq!(is_perfect_square(&nat(196)), SquareTest::Square(nat(14)));
        assert_eq!(is_perfect_square(&nat(9)), SquareTest::Square(nat(3)));
        assert_eq!(is_perfect_square(&nat(2)), SquareTest::NonSquare);
        assert_eq!(is_perfect_square(&nat(0)), SquareTest::Square(nat(0)));
        assert!(!is_perfect_square(&nat(203)).is_square());
    }

    #[test]
    fn residue_filter_examples() {
        assert!(!residue_filter(&nat(2)));
        assert_eq!(2 % 16, 2);
        assert!(residue_filter(&nat(196)));
        for k in 0..1000u64 {
            assert!(residue_filter(&nat(k * k)));
        }
    }

    #[test]
    fn residue_filter_rejects_most_non_squares() {
        let rejected = (0..RESIDUE_MODULUS).filter(|&r| !residue_passes(r)).count();
        // Passing fraction is (12/64)(16/63)(21/65)(6/11) ≈ 0.84%.
        assert!(rejected as f64 / f64::from(RESIDUE_MODULUS) > 0.99);
    }

    #[test]
    fn small_mod_agrees_with_bigint_remainder() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let n = rng.next_bits(300);
            let expected = (&n % RESIDUE_MODULUS).to_u32().unwrap();
            assert_eq!(small_mod(&n, RESIDUE_MODULUS), expected);
        }
    }

    fn trial_division_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn primality_examples() {
        assert!(is_probable_prime(&nat(11), 1));
        assert!(!is_probable_prime(&nat(1), 1));
        assert_eq!(3 * 11 * 17, 561);
        assert!(!is_probable_prime(&nat(561), 1));
        assert!(!is_probable_prime(&nat(0), 1));
    }

    #[test]
    fn primality_matches_trial_division_below_a_million() {
        for n in 0..1_000_000u64 {
            assert_eq!(is_probable_prime(&nat(n), 1), trial_division_prime(n), "n = {n}");
        }
    }

    #[test]
    fn wide_primality_path_handles_known_values() {
        // 2^89 − 1 and 2^127 − 1 are Mersenne primes; 2^67 − 1 is not.
        let m = |e: u32| (BigUint::one() << e) - 1u32;
        assert!(is_probable_prime(&m(89), 20));
        assert!(is_probable_prime(&m(127), 20));
        assert!(!is_probable_prime(&m(67), 20));
        // Strong pseudoprime to bases 2..37, caught only by base 41.
        let psp: BigUint = "318665857834031151167461".parse().unwrap();
        assert!(!is_probable_prime(&psp, 1));
        let bound: BigUint = DETERMINISTIC_BOUND.parse().unwrap();
        assert!(!is_probable_prime(&bound, 1));
        // Products of two large primes.
        let p = m(89);
        assert!(!is_probable_prime(&(&p * &p), 5));
        assert!(!is_probable_prime(&(&p * m(127)), 5));
    }

    #[test]
    fn modulus_parsing() {
        let m: Modulus = "187".parse().unwrap();
        assert_eq!(m.value, nat(187));
        assert_eq!(m.radix, Radix::Decimal);
        let h: Modulus = "0xBB".parse().unwrap();
        assert_eq!(h.value, nat(187));
        assert_eq!(h.radix, Radix::Hex);
        assert_eq!(h.to_string(), "0xbb");
        for bad in ["", "0x", "-5", "12a", "1 2", "+7", "0xg1"] {
            assert!(bad.parse::<Modulus>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn decimal_round_trip_at_4096_bits() {
        let mut rng = SplitMix64::new(5);
        let n = rng.next_bits(4096);
        let back: Modulus = n.to_string().parse().unwrap();
        assert_eq!(back.value, n);
    }
}
