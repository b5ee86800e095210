use std::fmt;
use std::str::FromStr;

use super::{BitVector, Gf2Error};

/// One received symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

/// A word over `{0, 1, ⊥}`: what a party sees after the erasure channel.
///
/// Stored as a value plane and an erasure plane; erased positions always
/// carry value 0 so two equal strings compare equal word-for-word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TriString {
    values: BitVector,
    erased: BitVector,
}

impl TriString {
    pub fn unerased(clean: &BitVector) -> Self {
        Self {
            values: clean.clone(),
            erased: BitVector::zeros(clean.len()),
        }
    }

    pub fn all_erased(len: usize) -> Self {
        Self {
            values: BitVector::zeros(len),
            erased: BitVector::ones(len),
        }
    }

    /// Erases every position set in `mask`.
    pub fn with_mask(clean: &BitVector, mask: &BitVector) -> Result<Self, Gf2Error> {
        if clean.len() != mask.len() {
            return Err(Gf2Error::DimensionMismatch {
                expected: clean.len(),
                found: mask.len(),
            });
        }
        let values = clean.and(&mask.not());
        Ok(Self {
            values,
            erased: mask.clone(),
        })
    }

    /// Rebuilds from planes; values under erasures are cleared.
    pub fn from_planes(values: BitVector, erased: BitVector) -> Result<Self, Gf2Error> {
        if values.len() != erased.len() {
            return Err(Gf2Error::DimensionMismatch {
                expected: values.len(),
                found: erased.len(),
            });
        }
        let values = values.and(&erased.not());
        Ok(Self { values, erased })
    }

    pub fn from_symbols(symbols: &[Symbol]) -> Self {
        let values = BitVector::from_fn(symbols.len(), |i| symbols[i] == Symbol::One);
        let erased = BitVector::from_fn(symbols.len(), |i| symbols[i] == Symbol::Erased);
        Self { values, erased }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn erased_count(&self) -> usize {
        self.erased.count_ones()
    }

    pub fn unerased_count(&self) -> usize {
        self.len() - self.erased_count()
    }

    pub fn symbol(&self, i: usize) -> Symbol {
        if self.erased.get(i) {
            Symbol::Erased
        } else if self.values.get(i) {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    /// Value plane (0 under erasures).
    pub fn values(&self) -> &BitVector {
        &self.values
    }

    /// Erasure plane, 1 = ⊥.
    pub fn erasures(&self) -> &BitVector {
        &self.erased
    }

    /// True iff `word` agrees with every unerased position.
    pub fn is_consistent_with(&self, word: &BitVector) -> bool {
        assert_eq!(word.len(), self.len());
        self.values
            .words()
            .iter()
            .zip(word.words())
            .zip(self.erased.words())
            .all(|((v, w), e)| (v ^ w) & !e == 0)
    }

    /// True iff every unerased symbol equals `bit`.
    pub fn all_unerased_equal(&self, bit: bool) -> bool {
        let n = self.len();
        self.values
            .words()
            .iter()
            .zip(self.erased.words())
            .enumerate()
            .all(|(wi, (v, e))| {
                let valid = if (wi + 1) * 64 <= n {
                    u64::MAX
                } else {
                    (1u64 << (n - wi * 64)) - 1
                };
                let want = if bit { valid } else { 0 };
                (v ^ want) & !e & valid == 0
            })
    }

    /// Index and value of the last unerased symbol, if any.
    pub fn last_unerased(&self) -> Option<(usize, bool)> {
        let n = self.len();
        let words = self.erased.words();
        for wi in (0..words.len()).rev() {
            let valid = if (wi + 1) * 64 <= n {
                u64::MAX
            } else {
                (1u64 << (n - wi * 64)) - 1
            };
            let present = !words[wi] & valid;
            if present != 0 {
                let bit = 63 - present.leading_zeros() as usize;
                let idx = wi * 64 + bit;
                return Some((idx, self.values.get(idx)));
            }
        }
        None
    }

    pub fn slice(&self, start: usize, len: usize) -> TriString {
        TriString {
            values: self.values.slice(start, len),
            erased: self.erased.slice(start, len),
        }
    }

    pub fn concat(parts: &[TriString]) -> TriString {
        let values: Vec<_> = parts.iter().map(|p| p.values.clone()).collect();
        let erased: Vec<_> = parts.iter().map(|p| p.erased.clone()).collect();
        TriString {
            values: BitVector::concat(&values),
            erased: BitVector::concat(&erased),
        }
    }
}

impl fmt::Display for TriString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(match self.symbol(i) {
                Symbol::Zero => "0",
                Symbol::One => "1",
                Symbol::Erased => "⊥",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TriString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 128 {
            write!(f, "TriString({self})")
        } else {
            write!(
                f,
                "TriString(len={}, erased={})",
                self.len(),
                self.erased_count()
            )
        }
    }
}

impl FromStr for TriString {
    type Err = Gf2Error;

    /// Accepts `0`, `1` and `⊥` (or `_`); whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                '⊥' | '_' => Ok(Symbol::Erased),
                other => Err(Gf2Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_symbols(&symbols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_replaces_with_bottom() {
        let clean: BitVector = "101".parse().unwrap();
        let t = TriString::with_mask(&clean, &"100".parse().unwrap()).unwrap();
        assert_eq!(t.to_string(), "⊥01");
        assert_eq!(t.erased_count(), 1);
        let none = TriString::with_mask(&clean, &BitVector::zeros(3)).unwrap();
        assert_eq!(none, TriString::unerased(&clean));
        let all = TriString::with_mask(&clean, &BitVector::ones(3)).unwrap();
        assert_eq!(all, TriString::all_erased(3));
    }

    #[test]
    fn constant_consistency() {
        let t: TriString = "1_1_1".parse().unwrap();
        assert!(t.all_unerased_equal(true));
        assert!(!t.all_unerased_equal(false));
        let e = TriString::all_erased(130);
        assert!(e.all_unerased_equal(true) && e.all_unerased_equal(false));
        let mixed: TriString = "10_".parse().unwrap();
        assert!(!mixed.all_unerased_equal(true));
    }

    #[test]
    fn last_unerased_scans_from_end() {
        let t: TriString = "01⊥0⊥⊥".parse().unwrap();
        assert_eq!(t.last_unerased(), Some((3, false)));
        assert_eq!(TriString::all_erased(70).last_unerased(), None);
        let mut long = BitVector::zeros(130);
        long.set(129, true);
        assert_eq!(
            TriString::unerased(&long).last_unerased(),
            Some((129, true))
        );
    }
}
