use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::codes::{
    derive_params, format_rational, parse_rational, IndexBits, ProtocolParams, Rational,
};
use crate::gf2::{BitVector, TriString};

use super::{AliceMode, BobCase, Phase, ProtocolError};

/// Everything that happened in one chunk. Received words are stored as the
/// delivered value plane plus the erasure mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkRecord {
    pub chunk_idx: usize,
    pub j: usize,
    pub alice_clean: BitVector,
    pub alice_mask: BitVector,
    pub alice_recv: BitVector,
    pub bob_clean: BitVector,
    pub bob_mask: BitVector,
    pub bob_recv: BitVector,
    pub bob_case: BobCase,
    /// Alice's `ind` at the end of the chunk.
    pub alice_ind: IndexBits,
    pub alice_mode: AliceMode,
    /// Bob's target index, once he has one.
    pub bob_index: Option<IndexBits>,
    pub xhat_set: bool,
    pub phase: Phase,
    /// Bob's two candidates, on the chunk where he learned them.
    pub new_pair: Option<(BitVector, BitVector)>,
    /// Bob's output, on the chunk where he fixed it.
    pub new_xhat: Option<BitVector>,
}

impl ChunkRecord {
    pub fn alice_received(&self) -> TriString {
        TriString::from_planes(
            self.alice_recv.and(&self.alice_mask.not()),
            self.alice_mask.clone(),
        )
        .expect("planes share a length")
    }

    pub fn bob_received(&self) -> TriString {
        TriString::from_planes(
            self.bob_recv.and(&self.bob_mask.not()),
            self.bob_mask.clone(),
        )
        .expect("planes share a length")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptHeader {
    pub n: usize,
    pub epsilon: Rational,
    pub x: BitVector,
    pub seed: u64,
    pub strategy: String,
    pub budget_fraction: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptTrailer {
    pub output: BitVector,
    pub erased_alice: u64,
    pub erased_bob: u64,
    pub budget_limit: u64,
    pub budget_spent: u64,
    /// Masks the runner had to cut down to the remaining budget.
    pub clamped: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub chunks: Vec<ChunkRecord>,
    pub trailer: TranscriptTrailer,
}

impl Transcript {
    pub fn success(&self) -> bool {
        self.trailer.output == self.header.x
    }

    pub fn params(&self) -> Result<ProtocolParams, ProtocolError> {
        Ok(derive_params(self.header.n, self.header.epsilon)?)
    }

    pub fn erased_bits(&self) -> u64 {
        self.trailer.erased_alice + self.trailer.erased_bob
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> Result<(), ProtocolError> {
        let params = self.params()?;
        let header = Line::Header(HeaderLine {
            n: self.header.n,
            epsilon: format_rational(&self.header.epsilon),
            x: self.header.x.to_hex(),
            seed: self.header.seed,
            strategy: self.header.strategy.clone(),
            budget_fraction: format_rational(&self.header.budget_fraction),
            params: params.report(),
        });
        write_line(&mut w, &header)?;
        for c in &self.chunks {
            let line = Line::Chunk(ChunkLine {
                chunk_idx: c.chunk_idx,
                j: c.j,
                alice_clean: c.alice_clean.to_hex(),
                alice_mask: c.alice_mask.to_hex(),
                alice_recv: c.alice_recv.to_hex(),
                bob_clean: c.bob_clean.to_hex(),
                bob_mask: c.bob_mask.to_hex(),
                bob_recv: c.bob_recv.to_hex(),
                bob_case: c.bob_case,
                alice_ind: c.alice_ind.clone(),
                alice_mode: c.alice_mode,
                bob_index: c.bob_index.clone(),
                xhat_set: c.xhat_set,
                phase: c.phase.number(),
                new_pair: c.new_pair.as_ref().map(|(a, b)| [a.to_hex(), b.to_hex()]),
                new_xhat: c.new_xhat.as_ref().map(BitVector::to_hex),
            });
            write_line(&mut w, &line)?;
        }
        let t = &self.trailer;
        write_line(
            &mut w,
            &Line::Trailer(TrailerLine {
                output: t.output.to_hex(),
                erased_alice: t.erased_alice,
                erased_bob: t.erased_bob,
                budget_limit: t.budget_limit,
                budget_spent: t.budget_spent,
                clamped: t.clamped,
            }),
        )?;
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self, ProtocolError> {
        let bad = |msg: String| ProtocolError::Transcript(msg);
        let mut header: Option<(TranscriptHeader, ProtocolParams)> = None;
        let mut chunks = Vec::new();
        let mut trailer = None;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(&line)
                .map_err(|e| bad(format!("line {}: {e}", lineno + 1)))?;
            match parsed {
                Line::Header(h) => {
                    let epsilon = parse_rational(&h.epsilon)?;
                    let params = derive_params(h.n, epsilon)?;
                    let x = BitVector::from_hex(h.n, &h.x).map_err(|e| bad(e.to_string()))?;
                    header = Some((
                        TranscriptHeader {
                            n: h.n,
                            epsilon,
                            x,
                            seed: h.seed,
                            strategy: h.strategy,
                            budget_fraction: parse_rational(&h.budget_fraction)?,
                        },
                        params,
                    ));
                }
                Line::Chunk(c) => {
                    let (h, params) = header
                        .as_ref()
                        .ok_or_else(|| bad("chunk before header".into()))?;
                    let n = h.n;
                    let hex = |len: usize, s: &str| {
                        BitVector::from_hex(len, s)
                            .map_err(|e| bad(format!("line {}: {e}", lineno + 1)))
                    };
                    let (p, q) = (params.p, params.bob_len);
                    chunks.push(ChunkRecord {
                        chunk_idx: c.chunk_idx,
                        j: c.j,
                        alice_clean: hex(p, &c.alice_clean)?,
                        alice_mask: hex(p, &c.alice_mask)?,
                        alice_recv: hex(p, &c.alice_recv)?,
                        bob_clean: hex(q, &c.bob_clean)?,
                        bob_mask: hex(q, &c.bob_mask)?,
                        bob_recv: hex(q, &c.bob_recv)?,
                        bob_case: c.bob_case,
                        alice_ind: c.alice_ind,
                        alice_mode: c.alice_mode,
                        bob_index: c.bob_index,
                        xhat_set: c.xhat_set,
                        phase: match c.phase {
                            0 => Phase::P0,
                            1 => Phase::P1,
                            2 => Phase::P2,
                            other => return Err(bad(format!("phase {other}"))),
                        },
                        new_pair: match &c.new_pair {
                            Some([a, b]) => Some((hex(n, a)?, hex(n, b)?)),
                            None => None,
                        },
                        new_xhat: c.new_xhat.as_deref().map(|s| hex(n, s)).transpose()?,
                    });
                }
                Line::Trailer(t) => {
                    let (h, _) = header
                        .as_ref()
                        .ok_or_else(|| bad("trailer before header".into()))?;
                    trailer = Some(TranscriptTrailer {
                        output: BitVector::from_hex(h.n, &t.output)
                            .map_err(|e| bad(e.to_string()))?,
                        erased_alice: t.erased_alice,
                        erased_bob: t.erased_bob,
                        budget_limit: t.budget_limit,
                        budget_spent: t.budget_spent,
                        clamped: t.clamped,
                    });
                }
            }
        }
        let (header, _) = header.ok_or_else(|| bad("missing header".into()))?;
        let trailer = trailer.ok_or_else(|| bad("missing trailer".into()))?;
        Ok(Self {
            header,
            chunks,
            trailer,
        })
    }
}

fn write_line(w: &mut impl Write, line: &Line) -> Result<(), ProtocolError> {
    serde_json::to_writer(&mut *w, line).map_err(|e| ProtocolError::Transcript(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Line {
    Header(HeaderLine),
    Chunk(ChunkLine),
    Trailer(TrailerLine),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct HeaderLine {
    n: usize,
    epsilon: String,
    x: String,
    seed: u64,
    strategy: String,
    budget_fraction: String,
    params: crate::codes::ParamsReport,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ChunkLine {
    chunk_idx: usize,
    j: usize,
    alice_clean: String,
    alice_mask: String,
    alice_recv: String,
    bob_clean: String,
    bob_mask: String,
    bob_recv: String,
    bob_case: BobCase,
    alice_ind: IndexBits,
    alice_mode: AliceMode,
    bob_index: Option<IndexBits>,
    xhat_set: bool,
    phase: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    new_pair: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    new_xhat: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TrailerLine {
    output: String,
    erased_alice: u64,
    erased_bob: u64,
    budget_limit: u64,
    budget_spent: u64,
    clamped: u64,
}
