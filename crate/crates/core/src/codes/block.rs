use crate::gf2::{words_for, BitVector, Eliminator, SolutionSpace, TriString};

use super::inner::{IndexBits, InnerCode, InnerMessage};
use super::outer::OuterCode;
use super::{CodeError, Rational};

/// The code Alice's transmissions form over one block while her `ind` is
/// still empty: chunk `j` carries the inner encoding of outer segment `j`.
#[derive(Clone, Debug)]
pub struct BlockCode {
    outer: OuterCode,
    inner: InnerCode,
    epsilon: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockDecode {
    /// At least `(3/4 − 9/4·ε)` of the block is erased.
    TooErased,
    Unique(BitVector),
    /// Exactly two inputs are consistent with the block.
    Pair(BitVector, BitVector),
}

impl BlockCode {
    pub fn new(outer: OuterCode, inner: InnerCode) -> Result<Self, CodeError> {
        if outer.alpha() != inner.layout().alpha {
            return Err(CodeError::LengthMismatch {
                expected: outer.alpha(),
                found: inner.layout().alpha,
            });
        }
        let epsilon = inner.epsilon();
        Ok(Self {
            outer,
            inner,
            epsilon,
        })
    }

    pub fn outer(&self) -> &OuterCode {
        &self.outer
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    pub fn chunks(&self) -> usize {
        self.outer.segments()
    }

    pub fn len(&self) -> usize {
        self.chunks() * self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn too_erased(&self, erased: usize) -> bool {
        let (a, d) = (*self.epsilon.numer() as u128, *self.epsilon.denom() as u128);
        4 * d * erased as u128 >= (3 * d - 9 * a) * self.len() as u128
    }

    pub fn encode(&self, x: &BitVector) -> Result<BitVector, CodeError> {
        let ct = self.outer.encode(x)?;
        let parts = (0..self.chunks())
            .map(|j| {
                self.inner.encode(&InnerMessage {
                    segment: self.outer.segment(&ct, j)?,
                    ind: IndexBits::new(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BitVector::concat(&parts))
    }

    /// List decodes one block given as its `N` received chunks.
    ///
    /// Each chunk's inner constraints are first reduced to at most `α`
    /// equations on its segment, which are then pulled back through the outer
    /// generator to equations on `x`.
    pub fn decode(&self, chunks: &[TriString]) -> Result<BlockDecode, CodeError> {
        if chunks.len() != self.chunks() {
            return Err(CodeError::LengthMismatch {
                expected: self.chunks(),
                found: chunks.len(),
            });
        }
        if let Some(bad) = chunks.iter().find(|c| c.len() != self.inner.len()) {
            return Err(CodeError::LengthMismatch {
                expected: self.inner.len(),
                found: bad.len(),
            });
        }
        let erased: usize = chunks.iter().map(TriString::erased_count).sum();
        if self.too_erased(erased) {
            return Ok(BlockDecode::TooErased);
        }
        let space = self.solve(chunks)?;
        let particular = space
            .particular()
            .ok_or(CodeError::NoConsistentWord)?
            .clone();
        match space.dim() {
            0 => Ok(BlockDecode::Unique(particular)),
            1 => {
                let other = particular.xor(&space.null_basis()[0]);
                Ok(BlockDecode::Pair(particular, other))
            }
            d => Err(CodeError::InternalListOverflow(
                1usize.checked_shl(d as u32).unwrap_or(usize::MAX),
            )),
        }
    }

    /// Every input consistent with the received chunks, ignoring the
    /// erasure threshold.
    pub(crate) fn solve(&self, chunks: &[TriString]) -> Result<SolutionSpace, CodeError> {
        let alpha = self.outer.alpha();
        let n = self.outer.input_bits();
        let payload_mask = (1u64 << alpha) - 1;
        let generator = self.outer.generator();
        let mut full = Eliminator::new(n);
        let mut row_n = vec![0u64; words_for(n).max(1)];
        for (j, chunk) in chunks.iter().enumerate() {
            let mut local = Eliminator::new(alpha);
            // `ind` is empty: the length and index fields are known zeros.
            let ok = self.inner.reduce(chunk, |row, rhs| {
                local.push(&[row >> 1 & payload_mask], rhs ^ (row & 1 == 1))
            });
            if !ok {
                return Err(CodeError::NoConsistentWord);
            }
            for (row, rhs) in local.basis_rows() {
                row_n.iter_mut().for_each(|w| *w = 0);
                let mut bits = row[0];
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for (w, g) in row_n.iter_mut().zip(generator.row_words(j * alpha + b)) {
                        *w ^= g;
                    }
                }
                if !full.push(&row_n, rhs) {
                    return Err(CodeError::NoConsistentWord);
                }
            }
        }
        Ok(full.finish())
    }
}
