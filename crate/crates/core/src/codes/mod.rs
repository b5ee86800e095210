//! Codes used by the protocol.
//!
//! Alice's chunk message is an inner codeword of `(segment, ind)`, where the
//! segment comes from a Reed–Solomon outer encoding of `x`. Concatenating
//! `block_len` consecutive chunks gives the block code, which Bob list
//! decodes to at most two candidates. Bob answers with one of four fixed
//! words.

mod block;
mod bob;
mod codebook;
mod field;
mod inner;
mod outer;
mod params;

pub use block::{BlockCode, BlockDecode};
pub use bob::{bob_decode, bob_encode, BobDecode, BobWord};
pub use codebook::{Codebook, QuickAudit};
pub use field::Gf2m;
pub use inner::{Candidate, IndexBits, InnerCode, InnerDecode, InnerLayout, InnerMessage};
pub use outer::OuterCode;
pub use params::{
    below_unique_radius, check_epsilon, derive_params, format_rational, ind_len_bits, inner_points,
    inner_too_erased, parse_rational, rational_to_f64, ParamsReport, ProtocolParams, Rational,
    MAX_FIELD_BITS,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error("cannot parse {0:?} as a rational")]
    BadRational(String),
    #[error("epsilon {0} must lie in (0, 1/8]")]
    EpsilonOutOfRange(String),
    #[error("n = {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("n = {0} is too small (need n >= 16)")]
    InputTooSmall(usize),
    #[error("outer field GF(2^{0}) is not supported")]
    FieldTooLarge(u32),
    #[error("inner message of {0} bits does not fit in 64")]
    InnerMessageTooWide(usize),
    #[error("{0} inner evaluation points exceed GF(256)")]
    InnerPointsOutOfRange(u64),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("segment {index} out of range ({segments} segments)")]
    SegmentOutOfRange { index: usize, segments: usize },
    #[error("inputs are identical")]
    IdenticalInputs,
    #[error("evaluation points must be distinct field elements, at least one per message symbol")]
    BadEvaluationPoints,
    #[error("index of {len} bits exceeds capacity {cap}")]
    MalformedInd { len: usize, cap: usize },
    #[error("more than two inner candidates ({0}); the code does not list decode here")]
    InternalListOverflow(usize),
    #[error("no consistent word")]
    NoConsistentWord,
    #[error("code audit failed: {0}")]
    AuditFailed(String),
}
