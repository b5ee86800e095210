//! Erasure adversaries and their budget.
//!
//! The adversary is online and sees everything: `x`, both parties' states
//! and every clean message before deciding which of its bits to erase. It
//! can only erase, never flip.

mod spec;
mod strategies;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::{Codebook, Rational};
use crate::gf2::{BitVector, TriString};
use crate::protocol::{Alice, Bob};

pub use spec::{default_suite, StrategySpec};
pub use strategies::{
    AnalysisGuided, FrontLoad, GuidedProfile, IidRate, NoNoise, RandomAdversary, ReplayAdversary,
    SilenceBob, TailErase,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

/// Global erasure allowance: `⌊fraction · totalBits⌋` bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    total_bits: u64,
    limit: u64,
    spent: u64,
}

impl Budget {
    pub fn new(total_bits: u64, fraction: Rational) -> Self {
        let limit = (total_bits as u128 * *fraction.numer() as u128 / *fraction.denom() as u128)
            .min(total_bits as u128) as u64;
        Self {
            total_bits,
            limit,
            spent: 0,
        }
    }

    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.spent
    }

    /// Debits `bits`; fails without debiting if that would overdraw.
    pub fn charge(&mut self, bits: u64) -> Result<(), u64> {
        if bits > self.remaining() {
            return Err(self.remaining());
        }
        self.spent += bits;
        Ok(())
    }
}

/// `6/11 − slack·ε`, the default budget fraction (floored at zero).
pub fn default_fraction(epsilon: Rational, slack: Rational) -> Rational {
    let base = Rational::new(6, 11);
    let cut = slack * epsilon;
    if cut >= base {
        Rational::from_integer(0)
    } else {
        base - cut
    }
}

/// Everything the adversary can see when deciding one mask.
pub struct ChannelView<'a> {
    pub book: &'a Arc<Codebook>,
    pub direction: Direction,
    /// 1-based chunk number.
    pub chunk_idx: usize,
    pub clean: &'a BitVector,
    pub x: &'a BitVector,
    pub alice: &'a Alice,
    pub bob: &'a Bob,
    pub remaining: u64,
}

pub trait Adversary {
    /// Positions of `view.clean` to erase. Masks with more ones than
    /// `view.remaining` are clamped by the runner and counted as a fault.
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector;

    /// Called with what the receiver got, after each delivery.
    fn observe(&mut self, _view: &ChannelView<'_>, _received: &TriString) {}
}

/// Keeps the lowest-index `keep` ones of `mask`.
pub fn truncate_mask(mask: &BitVector, keep: u64) -> BitVector {
    if mask.count_ones() as u64 <= keep {
        return mask.clone();
    }
    let mut out = BitVector::zeros(mask.len());
    for i in mask.iter_ones().take(keep as usize) {
        out.set(i, true);
    }
    out
}

/// The first `count` positions of a `len`-bit message (capped at `len`).
pub fn prefix_mask(len: usize, count: u64) -> BitVector {
    let count = count.min(len as u64) as usize;
    BitVector::from_fn(len, |i| i < count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_floors_and_refuses_overdraw() {
        let mut b = Budget::new(
            10_560_000,
            default_fraction(Rational::new(1, 10), Rational::from_integer(4)),
        );
        // (6/11 − 2/5)·10 560 000 = 1 536 000
        assert_eq!(b.limit(), 1_536_000);
        assert!(b.charge(1_000_000).is_ok());
        assert_eq!(b.charge(600_000), Err(536_000));
        assert_eq!(b.spent(), 1_000_000);
        let b = Budget::new(10, Rational::new(1, 3));
        assert_eq!(b.limit(), 3);
    }

    #[test]
    fn truncation_keeps_lowest_positions() {
        let m: BitVector = "0110110".parse().unwrap();
        assert_eq!(truncate_mask(&m, 2).to_string(), "0110000");
        assert_eq!(truncate_mask(&m, 9), m);
        assert_eq!(prefix_mask(5, 3).to_string(), "11100");
    }

    #[test]
    fn fraction_default() {
        let f = default_fraction(Rational::new(1, 10), Rational::from_integer(4));
        assert_eq!(f, Rational::new(8, 55));
        assert_eq!(
            default_fraction(Rational::new(1, 8), Rational::from_integer(100)),
            Rational::from_integer(0)
        );
    }
}
