//! The loop shared by both search directions.
//!
//! Fermat's recurrence walks `D_{k+1} = D_k + 2(y0 + k) + 1`; the x-scan
//! walks `N + (x+1)² = (N + x²) + 2x + 1`. Both are a value advanced by an
//! odd increment that itself grows by two, stopping at the first square.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::Budget;
use crate::numeric::{exact_root, exact_root_u128, residue_passes, small_mod, RESIDUE_MODULUS};

/// How often the wall-clock bound is consulted, as a mask on the index.
const CLOCK_CHECK_MASK: u64 = 0xFFF;

pub(crate) trait Accumulator: Sized {
    fn advance(&mut self, by: &Self);
    fn add_two(&mut self);
    fn square_root(&self) -> Option<Self>;
}

impl Accumulator for u128 {
    #[inline]
    fn advance(&mut self, by: &Self) {
        *self += *by;
    }

    #[inline]
    fn add_two(&mut self) {
        *self += 2;
    }

    fn square_root(&self) -> Option<Self> {
        exact_root_u128(*self)
    }
}

impl Accumulator for BigUint {
    #[inline]
    fn advance(&mut self, by: &Self) {
        *self += by;
    }

    #[inline]
    fn add_two(&mut self) {
        *self += 2u32;
    }

    fn square_root(&self) -> Option<Self> {
        exact_root(self)
    }
}

/// Running scan: `value` is tested at `index`, `increment` takes it to the
/// next index. Residues modulo [`RESIDUE_MODULUS`] are tracked alongside so
/// the filter never divides a wide integer.
pub(crate) struct Scan<A> {
    pub value: A,
    pub increment: A,
    pub index: u64,
    residue: u32,
    residue_increment: u32,
}

pub(crate) enum ScanEnd<A> {
    Square(A),
    Exhausted,
}

impl Scan<BigUint> {
    pub fn new(value: BigUint, increment: BigUint, index: u64) -> Self {
        let residue = small_mod(&value, RESIDUE_MODULUS);
        let residue_increment = small_mod(&increment, RESIDUE_MODULUS);
        Scan {
            value,
            increment,
            index,
            residue,
            residue_increment,
        }
    }

    /// Narrow to machine words when both running values leave headroom for
    /// every step up to `last_index`.
    pub fn narrow(&self, last_index: u64) -> Option<Scan<u128>> {
        let remaining = u128::from(last_index.checked_sub(self.index)?);
        let increment = self.increment.to_u128()?;
        let value = self.value.to_u128()?;
        // value grows by at most remaining * (increment + 2 * remaining).
        let growth = remaining.checked_mul(increment.checked_add(remaining.checked_mul(2)?)?)?;
        value.checked_add(growth)?;
        Some(Scan {
            value,
            increment,
            index: self.index,
            residue: self.residue,
            residue_increment: self.residue_increment,
        })
    }
}

impl Scan<u128> {
    pub fn widen(self) -> Scan<BigUint> {
        Scan {
            value: self.value.into(),
            increment: self.increment.into(),
            index: self.index,
            residue: self.residue,
            residue_increment: self.residue_increment,
        }
    }
}

impl<A: Accumulator> Scan<A> {
    /// Tests the current value, then steps, until a square turns up or the
    /// budget runs out. The value at the index where the budget ends has
    /// already been tested, so a resumed scan re-tests it harmlessly.
    pub fn run(&mut self, budget: &Budget) -> ScanEnd<A> {
        let started = Instant::now();
        let limit = budget
            .max_iterations
            .map(|m| self.index.saturating_add(m));
        loop {
            if residue_passes(self.residue) {
                if let Some(root) = self.value.square_root() {
                    return ScanEnd::Square(root);
                }
            }
            if limit == Some(self.index) {
                return ScanEnd::Exhausted;
            }
            if let Some(max) = budget.max_elapsed {
                if self.index & CLOCK_CHECK_MASK == 0 && started.elapsed() >= max {
                    return ScanEnd::Exhausted;
                }
            }
            self.step();
        }
    }

    #[inline]
    fn step(&mut self) {
        self.value.advance(&self.increment);
        self.increment.add_two();
        self.residue += self.residue_increment;
        if self.residue >= RESIDUE_MODULUS {
            self.residue -= RESIDUE_MODULUS;
        }
        self.residue_increment += 2;
        if self.residue_increment >= RESIDUE_MODULUS {
            self.residue_increment -= RESIDUE_MODULUS;
        }
        self.index += 1;
    }
}

/// Runs a scan on machine words when it provably cannot overflow them before
/// `last_index`, otherwise on arbitrary-precision integers.
pub(crate) fn run_scan(
    scan: Scan<BigUint>,
    last_index: u64,
    budget: &Budget,
) -> (Scan<BigUint>, ScanEnd<BigUint>) {
    match scan.narrow(last_index) {
        Some(mut narrow) => {
            let end = match narrow.run(budget) {
                ScanEnd::Square(root) => ScanEnd::Square(root.into()),
                ScanEnd::Exhausted => ScanEnd::Exhausted,
            };
            (narrow.widen(), end)
        }
        None => {
            let mut wide = scan;
            let end = wide.run(budget);
            (wide, end)
        }
    }
}
