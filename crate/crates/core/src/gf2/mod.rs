//! Bit-packed linear algebra over GF(2).
//!
//! Every encoder in the crate is a (possibly affine) GF(2)-linear map, so
//! erasure decoding reduces to solving the linear system given by the
//! unerased rows of a generator matrix. [`solve_affine_erasure`] returns the
//! full solution set as a particular solution plus a nullspace basis.

mod bitvec;
mod matrix;
mod solve;
mod tristring;

pub(crate) use bitvec::words_for;

pub use bitvec::BitVector;
pub use matrix::BitMatrix;
pub use solve::{solve_affine_erasure, Eliminator, SolutionSpace, TooMany};
pub use tristring::{Symbol, TriString};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
