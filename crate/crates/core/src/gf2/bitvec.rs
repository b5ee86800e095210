use std::fmt;
use std::str::FromStr;

use super::Gf2Error;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Fixed-length bit string packed little-endian into `u64` words.
///
/// Bits past `len` in the last word are always zero, so word-level
/// comparisons and popcounts are exact.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    /// Builds a vector from raw words; bits beyond `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    /// Low `len` bits of `value`, bit `i` of the vector is bit `i` of the integer.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS);
        Self::from_words(len, vec![value])
    }

    pub fn random<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..words_for(len)).map(|_| rng.gen::<u64>()).collect();
        Self::from_words(len, words)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Panics when `i` is out of range; see [`BitVector::try_get`].
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn try_get(&self, i: usize) -> Result<bool, Gf2Error> {
        if i < self.len {
            Ok(self.get(i))
        } else {
            Err(Gf2Error::IndexOutOfRange {
                index: i,
                len: self.len,
            })
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Value of the low 64 bits as an integer.
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        BitVector {
            len: self.len,
            words,
        }
    }

    pub fn not(&self) -> BitVector {
        let mut out = BitVector {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        parity_and(&self.words, &other.words)
    }

    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Bits `[start, start + len)` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVector::zeros(len);
        if start.is_multiple_of(WORD_BITS) {
            let w0 = start / WORD_BITS;
            let n = words_for(len);
            out.words.copy_from_slice(&self.words[w0..w0 + n]);
            out.clear_tail();
            return out;
        }
        for i in 0..len {
            if self.get(start + i) {
                out.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        out
    }

    /// Copies `src` into bits `[start, start + src.len())`.
    pub fn write_slice(&mut self, start: usize, src: &BitVector) {
        assert!(start + src.len <= self.len, "write out of range");
        if start.is_multiple_of(WORD_BITS) {
            let w0 = start / WORD_BITS;
            let full = src.len / WORD_BITS;
            self.words[w0..w0 + full].copy_from_slice(&src.words[..full]);
            for i in full * WORD_BITS..src.len {
                self.set(start + i, src.get(i));
            }
            return;
        }
        for i in 0..src.len {
            self.set(start + i, src.get(i));
        }
    }

    pub fn concat(parts: &[BitVector]) -> BitVector {
        let total = parts.iter().map(BitVector::len).sum();
        let mut out = BitVector::zeros(total);
        let mut at = 0;
        for p in parts {
            out.write_slice(at, p);
            at += p.len;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    /// Hex of the little-endian byte packing (bit 0 is the low bit of byte 0).
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let bytes: Vec<u8> = (0..nbytes)
            .map(|b| (self.words[b / 8] >> ((b % 8) * 8)) as u8)
            .collect();
        hex::encode(bytes)
    }

    pub fn from_hex(len: usize, s: &str) -> Result<Self, Gf2Error> {
        let bytes = hex::decode(s).map_err(|e| Gf2Error::Parse(e.to_string()))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Gf2Error::DimensionMismatch {
                expected: len.div_ceil(8),
                found: bytes.len(),
            });
        }
        let mut words = vec![0u64; words_for(len)];
        for (b, &byte) in bytes.iter().enumerate() {
            words[b / 8] |= (byte as u64) << ((b % 8) * 8);
        }
        let v = Self { len, words };
        let mut trimmed = v.clone();
        trimmed.clear_tail();
        if trimmed != v {
            return Err(Gf2Error::Parse("bits set beyond vector length".into()));
        }
        Ok(v)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

#[inline]
pub(crate) fn parity_and(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitVector({self})")
        } else {
            write!(f, "BitVector(len={}, hex={})", self.len, self.to_hex())
        }
    }
}

impl FromStr for BitVector {
    type Err = Gf2Error;

    /// Parses a string of `0`/`1` characters, first character is bit 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Gf2Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }
}
