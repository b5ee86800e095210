use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::{
    BlockDecode, BobWord, Candidate, CodeError, Codebook, IndexBits, InnerDecode, InnerMessage,
};
use crate::gf2::{BitVector, TriString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    P0,
    P1,
    P2,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::P0 => 0,
            Phase::P1 => 1,
            Phase::P2 => 2,
        }
    }
}

/// Which rule Bob applied to one of Alice's messages.
///
/// `C1`..`C7` are the Phase-1 case ladder in order; `C2None` is a Phase-1
/// message whose candidates match neither input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BobCase {
    /// Phase 0, not at a block boundary.
    P0Idle,
    P0TooErased,
    P0Unique,
    P0Pair,
    C1,
    C2,
    C2None,
    C4,
    C5,
    C6,
    C7,
    /// Phase 2, nothing decided from this message.
    P2Listen,
    /// Phase 2, the message pinned down which candidate Alice holds.
    P2Resolve,
    /// `x̂` was already set.
    Done,
}

impl BobCase {
    pub const ALL: [BobCase; 14] = [
        BobCase::P0Idle,
        BobCase::P0TooErased,
        BobCase::P0Unique,
        BobCase::P0Pair,
        BobCase::C1,
        BobCase::C2,
        BobCase::C2None,
        BobCase::C4,
        BobCase::C5,
        BobCase::C6,
        BobCase::C7,
        BobCase::P2Listen,
        BobCase::P2Resolve,
        BobCase::Done,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BobCase::P0Idle => "P0Idle",
            BobCase::P0TooErased => "P0TooErased",
            BobCase::P0Unique => "P0Unique",
            BobCase::P0Pair => "P0Pair",
            BobCase::C1 => "C1",
            BobCase::C2 => "C2",
            BobCase::C2None => "C2None",
            BobCase::C4 => "C4",
            BobCase::C5 => "C5",
            BobCase::C6 => "C6",
            BobCase::C7 => "C7",
            BobCase::P2Listen => "P2Listen",
            BobCase::P2Resolve => "P2Resolve",
            BobCase::Done => "Done",
        }
    }
}

/// The two candidate inputs learned at the end of Phase 0 and everything
/// Bob derives from them.
#[derive(Clone, Debug)]
pub struct CandidatePair {
    pub x0: BitVector,
    pub x1: BitVector,
    outer0: BitVector,
    outer1: BitVector,
    /// Smallest index where `x0` and `x1` differ, most significant bit first.
    pub index: IndexBits,
    /// `bad[j]`: segment `j` is the same for both candidates.
    pub bad: Vec<bool>,
}

impl CandidatePair {
    fn new(book: &Codebook, x0: BitVector, x1: BitVector) -> Result<Self, CodeError> {
        let outer0 = book.outer().encode(&x0)?;
        let outer1 = book.outer().encode(&x1)?;
        let alpha = book.params().alpha;
        let bad = (0..book.params().block_len)
            .map(|j| outer0.slice(j * alpha, alpha) == outer1.slice(j * alpha, alpha))
            .collect();
        let first = x0
            .xor(&x1)
            .iter_ones()
            .next()
            .ok_or(CodeError::IdenticalInputs)?;
        Ok(Self {
            index: IndexBits::from_index(first, book.params().ind_cap),
            x0,
            x1,
            outer0,
            outer1,
            bad,
        })
    }

    fn segment(&self, b: bool, j: usize, alpha: usize) -> BitVector {
        let outer = if b { &self.outer1 } else { &self.outer0 };
        outer.slice(j * alpha, alpha)
    }

    pub fn candidate(&self, b: bool) -> &BitVector {
        if b {
            &self.x1
        } else {
            &self.x0
        }
    }
}

/// The receiver.
#[derive(Clone, Debug)]
pub struct Bob {
    book: Arc<Codebook>,
    phase: Phase,
    xhat: Option<BitVector>,
    pair: Option<CandidatePair>,
    mes: u8,
    next: usize,
    fin: Option<u8>,
    par: Option<bool>,
    block: Vec<TriString>,
    last_bit: Option<bool>,
}

impl Bob {
    pub fn new(book: Arc<Codebook>) -> Self {
        let block = Vec::with_capacity(book.params().block_len);
        Self {
            book,
            phase: Phase::P0,
            xhat: None,
            pair: None,
            mes: 0,
            next: 0,
            fin: None,
            par: None,
            block,
            last_bit: None,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn xhat(&self) -> Option<&BitVector> {
        self.xhat.as_ref()
    }

    pub fn pair(&self) -> Option<&CandidatePair> {
        self.pair.as_ref()
    }

    pub fn index(&self) -> Option<&IndexBits> {
        self.pair.as_ref().map(|p| &p.index)
    }

    pub fn mes(&self) -> u8 {
        self.mes
    }

    pub fn next(&self) -> usize {
        self.next
    }

    pub fn fin(&self) -> Option<u8> {
        self.fin
    }

    pub fn par(&self) -> Option<bool> {
        self.par
    }

    pub fn last_bit(&self) -> Option<bool> {
        self.last_bit
    }

    pub fn next_word(&self) -> BobWord {
        if self.xhat.is_some() {
            return BobWord::new(1);
        }
        match self.phase {
            Phase::P0 => BobWord::new(0),
            Phase::P1 => BobWord::new(self.mes),
            Phase::P2 => BobWord::new(self.fin.expect("fin is set on entering Phase 2")),
        }
    }

    /// Output at the end of the protocol.
    pub fn finalize(&self) -> BitVector {
        if let Some(x) = &self.xhat {
            return x.clone();
        }
        match (&self.pair, self.phase) {
            (Some(pair), Phase::P2) => {
                let b = self.last_bit.is_some() && self.last_bit == self.par;
                pair.candidate(b).clone()
            }
            (Some(pair), _) => pair.x0.clone(),
            (None, _) => BitVector::zeros(self.book.params().n),
        }
    }

    pub fn receive(
        &mut self,
        chunk_idx: usize,
        received: &TriString,
    ) -> Result<BobCase, CodeError> {
        if self.xhat.is_some() {
            return Ok(BobCase::Done);
        }
        match self.phase {
            Phase::P0 => self.receive_phase0(chunk_idx, received),
            Phase::P1 => self.receive_phase1(chunk_idx, received),
            Phase::P2 => self.receive_phase2(chunk_idx, received),
        }
    }

    fn receive_phase0(
        &mut self,
        chunk_idx: usize,
        received: &TriString,
    ) -> Result<BobCase, CodeError> {
        let block_len = self.book.params().block_len;
        self.block.push(received.clone());
        if !chunk_idx.is_multiple_of(block_len) {
            return Ok(BobCase::P0Idle);
        }
        let block = std::mem::take(&mut self.block);
        match self.book.block().decode(&block)? {
            BlockDecode::TooErased => Ok(BobCase::P0TooErased),
            BlockDecode::Unique(x) => {
                self.xhat = Some(x);
                Ok(BobCase::P0Unique)
            }
            BlockDecode::Pair(x0, x1) => {
                let pair = CandidatePair::new(&self.book, x0, x1)?;
                self.mes = 1 + pair.index.get(0) as u8;
                self.next = 1;
                self.pair = Some(pair);
                self.phase = Phase::P1;
                Ok(BobCase::P0Pair)
            }
        }
    }

    /// Which candidate input each decoded element is consistent with.
    /// Messages match by segment; a constant `β` matches the candidate
    /// Alice would be holding if she sent `β` after Phase 2 began.
    fn matches<'a>(
        &self,
        list: &'a [Candidate],
        j: usize,
    ) -> Vec<(bool, Option<&'a InnerMessage>)> {
        let pair = self.pair.as_ref().expect("pair is set outside Phase 0");
        let alpha = self.book.params().alpha;
        let mut out = Vec::new();
        for c in list {
            match c {
                Candidate::Message(msg) => {
                    for b in [false, true] {
                        if msg.segment == pair.segment(b, j, alpha) {
                            out.push((b, Some(msg)));
                        }
                    }
                }
                Candidate::Const(beta) => {
                    if let Some(par) = self.par {
                        out.push((*beta == par, None));
                    }
                }
            }
        }
        out
    }

    /// Decodes Alice's message unless it is in `BAD` or too erased.
    fn decode_chunk(
        &self,
        chunk_idx: usize,
        received: &TriString,
    ) -> Result<Option<Vec<Candidate>>, CodeError> {
        let j = self.book.params().segment_of_chunk(chunk_idx);
        let pair = self.pair.as_ref().expect("pair is set outside Phase 0");
        if pair.bad[j] {
            return Ok(None);
        }
        match self.book.inner().list_decode(received)? {
            InnerDecode::TooErased => Ok(None),
            InnerDecode::Candidates { list, .. } => Ok(Some(list)),
        }
    }

    fn receive_phase1(
        &mut self,
        chunk_idx: usize,
        received: &TriString,
    ) -> Result<BobCase, CodeError> {
        let Some(list) = self.decode_chunk(chunk_idx, received)? else {
            return Ok(BobCase::C1);
        };
        let j = self.book.params().segment_of_chunk(chunk_idx);
        let matched = self.matches(&list, j);
        let has = |b: bool| matched.iter().any(|&(mb, _)| mb == b);
        match (has(false), has(true)) {
            (false, false) => return Ok(BobCase::C2None),
            (true, false) | (false, true) => {
                let b = has(true);
                self.xhat = Some(self.pair.as_ref().unwrap().candidate(b).clone());
                return Ok(BobCase::C2);
            }
            (true, true) => {}
        }
        // Both candidates present, so the list is exactly one message per side.
        let ind_of = |b: bool| {
            matched
                .iter()
                .find(|&&(mb, _)| mb == b)
                .and_then(|&(_, m)| m)
                .map(|m| m.ind.clone())
        };
        let (Some(ind0), Some(ind1)) = (ind_of(false), ind_of(true)) else {
            return Ok(BobCase::C2None);
        };
        let pair = self.pair.as_ref().unwrap();
        let next = self.next;
        let off_track = |ind: &IndexBits| {
            !(ind.len() + 1 == next || ind.len() == next) || !ind.is_prefix_of(&pair.index)
        };
        for (b, ind) in [(false, &ind0), (true, &ind1)] {
            if off_track(ind) {
                self.xhat = Some(pair.candidate(!b).clone());
                return Ok(BobCase::C4);
            }
        }
        if ind0.len() != ind1.len() {
            self.phase = Phase::P2;
            self.fin = Some(3);
            self.par = Some(ind1.len() % 2 == 1);
            return Ok(BobCase::C5);
        }
        if ind0.len() + 1 == next {
            return Ok(BobCase::C6);
        }
        let bit = pair.index.get(next) as u8;
        self.mes = (self.mes + 1 + bit) % 3;
        self.next += 1;
        if self.next == self.book.params().ind_cap {
            let i = pair.index.to_index();
            self.par = Some(pair.x1.get(i));
            self.fin = Some(self.mes);
            self.phase = Phase::P2;
        }
        Ok(BobCase::C7)
    }

    fn receive_phase2(
        &mut self,
        chunk_idx: usize,
        received: &TriString,
    ) -> Result<BobCase, CodeError> {
        if let Some((_, bit)) = received.last_unerased() {
            self.last_bit = Some(bit);
        }
        let Some(list) = self.decode_chunk(chunk_idx, received)? else {
            return Ok(BobCase::P2Listen);
        };
        let j = self.book.params().segment_of_chunk(chunk_idx);
        let matched = self.matches(&list, j);
        let has = |b: bool| matched.iter().any(|&(mb, _)| mb == b);
        match (has(false), has(true)) {
            (true, false) | (false, true) => {
                let b = has(true);
                self.xhat = Some(self.pair.as_ref().unwrap().candidate(b).clone());
                Ok(BobCase::P2Resolve)
            }
            _ => Ok(BobCase::P2Listen),
        }
    }
}
