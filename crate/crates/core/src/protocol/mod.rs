//! The two parties, the chunk schedule and transcripts.
//!
//! Each chunk is one `p`-bit message from Alice followed by one `3p/8`-bit
//! reply from Bob. The runner passes each clean message through the
//! adversary, delivers the erased version, and records everything needed to
//! replay the run bit for bit.

mod alice;
mod bob;
mod runner;
mod transcript;

pub use alice::{Alice, AliceCase, AliceMode};
pub use bob::{Bob, BobCase, CandidatePair, Phase};
pub use runner::{replay, run_protocol, RunSetup};
pub use transcript::{ChunkRecord, Transcript, TranscriptHeader, TranscriptTrailer};

use crate::codes::CodeError;

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("malformed transcript: {0}")]
    Transcript(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
