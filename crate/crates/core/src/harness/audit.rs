use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::adversary::Budget;
use crate::codes::{bob_encode, BobWord, Codebook, IndexBits, InnerMessage};
use crate::gf2::BitVector;
use crate::protocol::{replay, AliceMode, Transcript};

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AuditCheck {
    /// Re-running the recorded masks reproduces the transcript.
    Replay,
    /// Masks, received words, erasure counts and the budget agree.
    Ledger,
    /// Alice's `ind` is a prefix of Bob's index until `x̂` is set.
    Prefix,
    /// Every clean message is one a correct party could have sent.
    Closure,
    /// Chunk count and the `11/8 · p · T` bit total.
    Accounting,
    /// Bob's candidates contain `x` and his output, once set, is `x`.
    Truth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: AuditCheck,
    /// 1-based chunk, or `None` for whole-transcript checks.
    pub chunk: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.chunk {
            Some(c) => write!(f, "{:?} @ chunk {c}: {}", self.check, self.detail),
            None => write!(f, "{:?}: {}", self.check, self.detail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditReport {
    pub chunks: usize,
    pub total_bits: u64,
    pub erased_bits: u64,
    pub success: bool,
    pub replayed: bool,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, check: AuditCheck) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }
}

/// Checks a transcript against the codebook it claims to use. Replay is the
/// expensive part and can be skipped.
pub fn audit_transcript(
    t: &Transcript,
    book: &Arc<Codebook>,
    replay_check: bool,
) -> Result<AuditReport, HarnessError> {
    let params = t.params()?;
    if &params != book.params() {
        return Err(HarnessError::Config(format!(
            "transcript is for n={} ε={}, codebook for n={} ε={}",
            params.n,
            t.header.epsilon,
            book.params().n,
            book.params().epsilon
        )));
    }
    let mut out = Vec::new();
    let mut flag = |check, chunk: Option<usize>, detail: String| {
        out.push(Violation {
            check,
            chunk,
            detail,
        })
    };

    // accounting
    if t.chunks.len() != params.t {
        flag(
            AuditCheck::Accounting,
            None,
            format!("{} chunks, expected {}", t.chunks.len(), params.t),
        );
    }
    for (k, c) in t.chunks.iter().enumerate() {
        if c.chunk_idx != k + 1 {
            flag(
                AuditCheck::Accounting,
                Some(k + 1),
                format!("numbered {}", c.chunk_idx),
            );
        }
    }
    let sent: u64 = t
        .chunks
        .iter()
        .map(|c| (c.alice_clean.len() + c.bob_clean.len()) as u64)
        .sum();
    if 8 * sent != 11 * params.p as u64 * params.t as u64 || sent != params.total_bits() {
        flag(
            AuditCheck::Accounting,
            None,
            format!("{sent} bits sent, expected 11/8·p·T"),
        );
    }

    // ledger
    let (mut erased_alice, mut erased_bob) = (0u64, 0u64);
    for c in &t.chunks {
        for (who, clean, mask, recv) in [
            ("alice", &c.alice_clean, &c.alice_mask, &c.alice_recv),
            ("bob", &c.bob_clean, &c.bob_mask, &c.bob_recv),
        ] {
            let keep = mask.not();
            if recv.and(&keep) != clean.and(&keep) {
                flag(
                    AuditCheck::Ledger,
                    Some(c.chunk_idx),
                    format!("{who}: unerased bit altered"),
                );
            }
            if !recv.and(mask).is_zero() {
                flag(
                    AuditCheck::Ledger,
                    Some(c.chunk_idx),
                    format!("{who}: value under an erasure"),
                );
            }
        }
        erased_alice += c.alice_mask.count_ones() as u64;
        erased_bob += c.bob_mask.count_ones() as u64;
    }
    let tr = &t.trailer;
    if (erased_alice, erased_bob) != (tr.erased_alice, tr.erased_bob) {
        flag(
            AuditCheck::Ledger,
            None,
            format!(
                "recounted {erased_alice}+{erased_bob} erasures, trailer says {}+{}",
                tr.erased_alice, tr.erased_bob
            ),
        );
    }
    if erased_alice + erased_bob != tr.budget_spent {
        flag(
            AuditCheck::Ledger,
            None,
            format!(
                "spent {} ≠ erasures {}",
                tr.budget_spent,
                erased_alice + erased_bob
            ),
        );
    }
    let limit = Budget::new(params.total_bits(), t.header.budget_fraction).limit();
    if tr.budget_limit != limit {
        flag(
            AuditCheck::Ledger,
            None,
            format!("limit {} ≠ ⌊fraction·total⌋ = {limit}", tr.budget_limit),
        );
    }
    if tr.budget_spent > limit {
        flag(
            AuditCheck::Ledger,
            None,
            format!("spent {} over limit {limit}", tr.budget_spent),
        );
    }
    if tr.clamped > 0 {
        flag(
            AuditCheck::Ledger,
            None,
            format!("{} over-budget masks clamped", tr.clamped),
        );
    }

    // prefix
    for c in t.chunks.iter().filter(|c| !c.xhat_set) {
        let ok = match &c.bob_index {
            Some(i) => c.alice_ind.is_prefix_of(i),
            None => c.alice_ind.is_empty(),
        };
        if !ok {
            let bob = c
                .bob_index
                .as_ref()
                .map_or("none".into(), IndexBits::to_string);
            flag(
                AuditCheck::Prefix,
                Some(c.chunk_idx),
                format!("ind {} vs Bob's {bob}", c.alice_ind),
            );
        }
    }

    // closure
    let outer_x = book.outer().encode(&t.header.x)?;
    let bob_words: Vec<BitVector> = BobWord::all()
        .iter()
        .map(|&w| bob_encode(w, params.bob_len))
        .collect();
    let mut ind = IndexBits::new();
    let mut mode = AliceMode::Encoding;
    for c in &t.chunks {
        let expected = match mode {
            AliceMode::ConstantBit(b) => {
                if b {
                    BitVector::ones(params.p)
                } else {
                    BitVector::zeros(params.p)
                }
            }
            AliceMode::Encoding => {
                let msg = InnerMessage {
                    segment: outer_x.slice(c.j * params.alpha, params.alpha),
                    ind: ind.clone(),
                };
                book.inner().encode(&msg)?
            }
        };
        if c.j != params.segment_of_chunk(c.chunk_idx) {
            flag(
                AuditCheck::Closure,
                Some(c.chunk_idx),
                format!("segment {}", c.j),
            );
        }
        if c.alice_clean != expected {
            flag(
                AuditCheck::Closure,
                Some(c.chunk_idx),
                "Alice's message is not her codeword".into(),
            );
        }
        if !bob_words.contains(&c.bob_clean) {
            flag(
                AuditCheck::Closure,
                Some(c.chunk_idx),
                "Bob's message is not a feedback word".into(),
            );
        }
        let grew = c.alice_ind.len() == ind.len() + 1 && ind.is_prefix_of(&c.alice_ind);
        if c.alice_ind != ind && !grew {
            flag(
                AuditCheck::Closure,
                Some(c.chunk_idx),
                format!("ind jumped from {ind} to {}", c.alice_ind),
            );
        }
        if matches!(mode, AliceMode::ConstantBit(_)) && c.alice_mode != mode {
            flag(
                AuditCheck::Closure,
                Some(c.chunk_idx),
                "Alice left constant mode".into(),
            );
        }
        ind = c.alice_ind.clone();
        mode = c.alice_mode;
    }

    // truth
    let x = &t.header.x;
    for c in &t.chunks {
        if let Some((a, b)) = &c.new_pair {
            if a != x && b != x {
                flag(
                    AuditCheck::Truth,
                    Some(c.chunk_idx),
                    "candidate pair misses x".into(),
                );
            }
        }
        if c.new_xhat.as_ref().is_some_and(|v| v != x) {
            flag(
                AuditCheck::Truth,
                Some(c.chunk_idx),
                "Bob fixed a wrong output".into(),
            );
        }
    }

    if replay_check {
        let again = replay(t, book)?;
        if again.header != t.header {
            flag(AuditCheck::Replay, None, "header differs".into());
        }
        if let Some(c) = t.chunks.iter().zip(&again.chunks).find(|(a, b)| a != b) {
            flag(
                AuditCheck::Replay,
                Some(c.0.chunk_idx),
                "replayed chunk differs".into(),
            );
        }
        let mut trailer = again.trailer.clone();
        trailer.clamped = t.trailer.clamped;
        if trailer != t.trailer {
            flag(AuditCheck::Replay, None, "replayed trailer differs".into());
        }
    }

    Ok(AuditReport {
        chunks: t.chunks.len(),
        total_bits: sent,
        erased_bits: erased_alice + erased_bob,
        success: t.success(),
        replayed: replay_check,
        violations: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::StrategySpec;
    use crate::codes::{derive_params, Rational};
    use crate::protocol::{run_protocol, RunSetup};

    fn run(n: usize, spec: StrategySpec, fraction: Rational) -> (Arc<Codebook>, Transcript) {
        let book =
            Arc::new(Codebook::new(derive_params(n, Rational::new(1, 10)).unwrap()).unwrap());
        let x = BitVector::from_fn(n, |i| i % 5 == 1);
        let mut adv = spec.build(book.params(), 3);
        let setup = RunSetup {
            seed: 3,
            strategy: spec.label(),
            budget_fraction: fraction,
        };
        let t = run_protocol(&book, &x, adv.as_mut(), &setup).unwrap();
        (book, t)
    }

    fn guided() -> StrategySpec {
        StrategySpec::AnalysisGuided {
            stall_blocks: 1,
            decoy_bit: None,
            silence_bob: true,
            tail_from: None,
        }
    }

    #[test]
    fn honest_runs_audit_clean() {
        let (book, t) = run(16, guided(), Rational::new(8, 55));
        let r = audit_transcript(&t, &book, true).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        assert_eq!(
            8 * r.total_bits,
            11 * (book.params().p * book.params().t) as u64
        );
        // over budget the output is wrong but the run is still well formed
        let (book, t) = run(16, StrategySpec::FrontLoad, Rational::from_integer(1));
        let r = audit_transcript(&t, &book, true).unwrap();
        assert!(!r.success);
        assert!(r.is_clean(), "{:?}", r.violations);
    }

    #[test]
    fn tampered_received_bit_is_flagged() {
        let (book, mut t) = run(
            16,
            StrategySpec::IidRate { rate: 0.2 },
            Rational::new(8, 55),
        );
        let c = &mut t.chunks[4];
        let pos = c.alice_mask.not().iter_ones().next().unwrap();
        c.alice_recv.flip(pos);
        let r = audit_transcript(&t, &book, false).unwrap();
        assert!(r.has(AuditCheck::Ledger));
        assert_eq!(r.violations[0].chunk, Some(5));
    }

    #[test]
    fn tampered_clean_message_and_counts_are_flagged() {
        let (book, mut t) = run(16, StrategySpec::NoNoise, Rational::new(8, 55));
        t.chunks[2].alice_clean.flip(0);
        t.chunks[2].alice_recv.flip(0);
        t.trailer.erased_bob += 1;
        let r = audit_transcript(&t, &book, true).unwrap();
        assert!(r.has(AuditCheck::Closure));
        assert!(r.has(AuditCheck::Ledger));
        assert!(r.has(AuditCheck::Replay));
        assert!(!r.has(AuditCheck::Prefix));
    }

    #[test]
    fn broken_prefix_and_truth_are_flagged() {
        let (book, mut t) = run(16, StrategySpec::NoNoise, Rational::new(8, 55));
        let c = &mut t.chunks[0];
        c.alice_ind = "1".parse().unwrap();
        c.new_pair = Some((BitVector::zeros(16), BitVector::ones(16)));
        t.chunks.pop();
        let r = audit_transcript(&t, &book, false).unwrap();
        assert!(r.has(AuditCheck::Prefix));
        assert!(r.has(AuditCheck::Truth));
        assert!(r.has(AuditCheck::Accounting));
    }
}
