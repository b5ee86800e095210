use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::{bob_decode, BobDecode, CodeError, Codebook, IndexBits, InnerMessage};
use crate::gf2::{BitVector, TriString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AliceMode {
    /// Sending inner codewords of `(segment, ind)`.
    Encoding,
    /// Sending `β^p` for the rest of the protocol.
    ConstantBit(bool),
}

/// What Alice did with one of Bob's messages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AliceCase {
    /// Two thirds or more erased.
    Erased,
    /// Bob repeated the value she already holds.
    Repeat,
    /// A new value: one more index bit.
    Append(bool),
    /// Bob said `3̄`.
    Stop,
    /// Already sending a constant; the message is ignored.
    Constant,
}

/// The sender. Holds `x`, its outer encoding, and the index prefix learned
/// from Bob so far.
#[derive(Clone, Debug)]
pub struct Alice {
    book: Arc<Codebook>,
    x: BitVector,
    outer: BitVector,
    ind: IndexBits,
    mes: u8,
    mode: AliceMode,
}

impl Alice {
    pub fn new(book: Arc<Codebook>, x: BitVector) -> Result<Self, CodeError> {
        let outer = book.outer().encode(&x)?;
        Ok(Self {
            book,
            x,
            outer,
            ind: IndexBits::new(),
            mes: 0,
            mode: AliceMode::Encoding,
        })
    }

    pub fn x(&self) -> &BitVector {
        &self.x
    }

    pub fn ind(&self) -> &IndexBits {
        &self.ind
    }

    pub fn mes(&self) -> u8 {
        self.mes
    }

    pub fn mode(&self) -> AliceMode {
        self.mode
    }

    /// The message this Alice would send in the 1-based chunk `chunk_idx`.
    pub fn next_message(&self, chunk_idx: usize) -> BitVector {
        let p = self.book.params().p;
        match self.mode {
            AliceMode::ConstantBit(true) => BitVector::ones(p),
            AliceMode::ConstantBit(false) => BitVector::zeros(p),
            AliceMode::Encoding => {
                let j = self.book.params().segment_of_chunk(chunk_idx);
                let alpha = self.book.params().alpha;
                let msg = InnerMessage {
                    segment: self.outer.slice(j * alpha, alpha),
                    ind: self.ind.clone(),
                };
                self.book
                    .inner()
                    .encode(&msg)
                    .expect("ind never exceeds its capacity")
            }
        }
    }

    pub fn receive(&mut self, received: &TriString) -> Result<AliceCase, CodeError> {
        if let AliceMode::ConstantBit(_) = self.mode {
            return Ok(AliceCase::Constant);
        }
        let gamma = match bob_decode(received)? {
            BobDecode::Ambiguous => return Ok(AliceCase::Erased),
            BobDecode::Unique(w) => w.gamma(),
        };
        if gamma == 3 {
            self.mode = AliceMode::ConstantBit(self.ind.len() % 2 == 1);
            return Ok(AliceCase::Stop);
        }
        if gamma == self.mes {
            return Ok(AliceCase::Repeat);
        }
        let b = (gamma + 6 - self.mes - 1) % 3 == 1;
        self.ind.push(b);
        self.mes = gamma;
        if self.ind.len() == self.book.params().ind_cap {
            let i = self.ind.to_index();
            self.mode = AliceMode::ConstantBit(self.x.get(i));
        }
        Ok(AliceCase::Append(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{bob_encode, derive_params, BobWord, Rational};

    fn book() -> Arc<Codebook> {
        Arc::new(Codebook::new(derive_params(64, Rational::new(1, 10)).unwrap()).unwrap())
    }

    fn word(book: &Codebook, g: u8) -> TriString {
        TriString::unerased(&bob_encode(BobWord::new(g), book.params().bob_len))
    }

    #[test]
    fn case_two_formula() {
        let book = book();
        let mut a = Alice::new(book.clone(), BitVector::zeros(64)).unwrap();
        // mes 0, γ = 2 → b = 1
        assert_eq!(a.receive(&word(&book, 2)).unwrap(), AliceCase::Append(true));
        assert_eq!((a.ind().to_string().as_str(), a.mes()), ("1", 2));
        // mes 2, γ = 0 → b = (0 − 2 − 1) mod 3 = 0
        assert_eq!(
            a.receive(&word(&book, 0)).unwrap(),
            AliceCase::Append(false)
        );
        assert_eq!(a.ind().to_string(), "10");
        assert_eq!(a.receive(&word(&book, 0)).unwrap(), AliceCase::Repeat);
        let erased = TriString::all_erased(book.params().bob_len);
        assert_eq!(a.receive(&erased).unwrap(), AliceCase::Erased);
        assert_eq!(a.ind().to_string(), "10");
    }

    #[test]
    fn full_index_switches_to_the_indexed_bit() {
        let book = book();
        let mut x = BitVector::zeros(64);
        x.set(0b101010, true);
        let mut a = Alice::new(book.clone(), x).unwrap();
        // bits 1,0,1,0,1,0: each step γ = mes + 1 + b mod 3
        let mut mes = 0u8;
        for &b in &[1u8, 0, 1, 0, 1, 0] {
            mes = (mes + 1 + b) % 3;
            a.receive(&word(&book, mes)).unwrap();
        }
        assert_eq!(a.ind().to_index(), 0b101010);
        assert_eq!(a.mode(), AliceMode::ConstantBit(true));
        assert!(a.next_message(1).count_ones() == book.params().p);
        // absorbing
        assert_eq!(a.receive(&word(&book, 3)).unwrap(), AliceCase::Constant);
    }

    #[test]
    fn three_sends_length_parity() {
        let book = book();
        let mut a = Alice::new(book.clone(), BitVector::zeros(64)).unwrap();
        a.receive(&word(&book, 1)).unwrap();
        assert_eq!(a.receive(&word(&book, 3)).unwrap(), AliceCase::Stop);
        assert_eq!(a.mode(), AliceMode::ConstantBit(true));
    }

    #[test]
    fn chunks_cycle_through_segments() {
        let book = book();
        let a = Alice::new(book.clone(), BitVector::from_fn(64, |i| i % 3 == 0)).unwrap();
        let bl = book.params().block_len;
        assert_eq!(a.next_message(1), a.next_message(bl + 1));
        assert_ne!(a.next_message(1), a.next_message(2));
    }
}
