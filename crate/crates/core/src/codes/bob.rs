use crate::gf2::{BitVector, TriString};

use super::CodeError;

const PATTERNS: [[bool; 3]; 4] = [
    [false, false, false],
    [false, true, true],
    [true, false, true],
    [true, true, false],
];

/// One of Bob's four feedback words, `γ ∈ {0,1,2,3}`.
///
/// Word `γ` is a 3-bit pattern repeated `p/8` times; the patterns are the
/// even-weight words of length 3, so any two encodings differ in exactly
/// two thirds of their positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BobWord(u8);

impl BobWord {
    pub fn new(gamma: u8) -> Self {
        assert!(gamma < 4, "Bob words are 0..=3, got {gamma}");
        Self(gamma)
    }

    pub fn gamma(self) -> u8 {
        self.0
    }

    pub fn all() -> [BobWord; 4] {
        [Self(0), Self(1), Self(2), Self(3)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BobDecode {
    /// At least two thirds of the word is erased.
    Ambiguous,
    Unique(BobWord),
}

/// `len` bits of the periodic pattern of `w`; `len` is `3p/8`.
pub fn bob_encode(w: BobWord, len: usize) -> BitVector {
    let pat = PATTERNS[w.0 as usize];
    BitVector::from_fn(len, |i| pat[i % 3])
}

pub fn bob_decode(received: &TriString) -> Result<BobDecode, CodeError> {
    let len = received.len();
    if 3 * received.erased_count() >= 2 * len {
        return Ok(BobDecode::Ambiguous);
    }
    BobWord::all()
        .into_iter()
        .find(|&w| received.is_consistent_with(&bob_encode(w, len)))
        .map(BobDecode::Unique)
        .ok_or(CodeError::NoConsistentWord)
}
