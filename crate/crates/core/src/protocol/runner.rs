use std::sync::Arc;

use crate::adversary::{Adversary, Budget, ChannelView, Direction, ReplayAdversary};
use crate::codes::{bob_encode, CodeError, Codebook, Rational};
use crate::gf2::{BitVector, TriString};

use super::{
    Alice, Bob, BobCase, ChunkRecord, ProtocolError, Transcript, TranscriptHeader,
    TranscriptTrailer,
};

/// Run metadata copied into the transcript header.
#[derive(Clone, Debug)]
pub struct RunSetup {
    pub seed: u64,
    pub strategy: String,
    pub budget_fraction: Rational,
}

/// Runs all `T` chunks against `adversary` and returns the full transcript.
pub fn run_protocol(
    book: &Arc<Codebook>,
    x: &BitVector,
    adversary: &mut dyn Adversary,
    setup: &RunSetup,
) -> Result<Transcript, ProtocolError> {
    let params = book.params().clone();
    if x.len() != params.n {
        return Err(CodeError::LengthMismatch {
            expected: params.n,
            found: x.len(),
        }
        .into());
    }
    let mut budget = Budget::new(params.total_bits(), setup.budget_fraction);
    let mut alice = Alice::new(book.clone(), x.clone())?;
    let mut bob = Bob::new(book.clone());
    let mut chunks = Vec::with_capacity(params.t);
    let (mut erased_alice, mut erased_bob, mut clamped) = (0u64, 0u64, 0u64);

    for chunk_idx in 1..=params.t {
        let alice_clean = alice.next_message(chunk_idx);
        let (alice_mask, alice_recv) = {
            let view = ChannelView {
                book,
                direction: Direction::AliceToBob,
                chunk_idx,
                clean: &alice_clean,
                x,
                alice: &alice,
                bob: &bob,
                remaining: budget.remaining(),
            };
            let mask = adversary.decide(&view);
            let (mask, cut) = charge(&mut budget, mask, alice_clean.len())?;
            clamped += cut as u64;
            let recv = TriString::with_mask(&alice_clean, &mask).expect("mask length checked");
            adversary.observe(&view, &recv);
            (mask, recv)
        };
        erased_alice += alice_mask.count_ones() as u64;
        let had_xhat = bob.xhat().is_some();
        let bob_case = bob.receive(chunk_idx, &alice_recv)?;
        let new_xhat = match bob.xhat() {
            Some(v) if !had_xhat => Some(v.clone()),
            _ => None,
        };
        let new_pair = match (bob_case, bob.pair()) {
            (BobCase::P0Pair, Some(pair)) => Some((pair.x0.clone(), pair.x1.clone())),
            _ => None,
        };

        let bob_clean = bob_encode(bob.next_word(), params.bob_len);
        let (bob_mask, bob_recv) = {
            let view = ChannelView {
                book,
                direction: Direction::BobToAlice,
                chunk_idx,
                clean: &bob_clean,
                x,
                alice: &alice,
                bob: &bob,
                remaining: budget.remaining(),
            };
            let mask = adversary.decide(&view);
            let (mask, cut) = charge(&mut budget, mask, bob_clean.len())?;
            clamped += cut as u64;
            let recv = TriString::with_mask(&bob_clean, &mask).expect("mask length checked");
            adversary.observe(&view, &recv);
            (mask, recv)
        };
        erased_bob += bob_mask.count_ones() as u64;
        alice.receive(&bob_recv)?;

        chunks.push(ChunkRecord {
            chunk_idx,
            j: params.segment_of_chunk(chunk_idx),
            alice_clean,
            alice_mask,
            alice_recv: alice_recv.values().clone(),
            bob_clean,
            bob_mask,
            bob_recv: bob_recv.values().clone(),
            bob_case,
            alice_ind: alice.ind().clone(),
            alice_mode: alice.mode(),
            bob_index: bob.index().cloned(),
            xhat_set: bob.xhat().is_some(),
            phase: bob.phase(),
            new_pair,
            new_xhat,
        });
    }

    Ok(Transcript {
        header: TranscriptHeader {
            n: params.n,
            epsilon: params.epsilon,
            x: x.clone(),
            seed: setup.seed,
            strategy: setup.strategy.clone(),
            budget_fraction: setup.budget_fraction,
        },
        chunks,
        trailer: TranscriptTrailer {
            output: bob.finalize(),
            erased_alice,
            erased_bob,
            budget_limit: budget.limit(),
            budget_spent: budget.spent(),
            clamped,
        },
    })
}

/// Debits a mask, cutting it to the remaining budget if needed.
fn charge(
    budget: &mut Budget,
    mask: BitVector,
    len: usize,
) -> Result<(BitVector, bool), ProtocolError> {
    if mask.len() != len {
        return Err(CodeError::LengthMismatch {
            expected: len,
            found: mask.len(),
        }
        .into());
    }
    let want = mask.count_ones() as u64;
    let (mask, cut) = if want > budget.remaining() {
        (
            crate::adversary::truncate_mask(&mask, budget.remaining()),
            true,
        )
    } else {
        (mask, false)
    };
    budget
        .charge(mask.count_ones() as u64)
        .expect("mask fits the remaining budget");
    Ok((mask, cut))
}

/// Re-runs a transcript's masks from its header and returns the new transcript.
pub fn replay(transcript: &Transcript, book: &Arc<Codebook>) -> Result<Transcript, ProtocolError> {
    let masks = transcript
        .chunks
        .iter()
        .map(|c| (c.alice_mask.clone(), c.bob_mask.clone()))
        .collect();
    let mut adversary = ReplayAdversary::new(masks);
    let setup = RunSetup {
        seed: transcript.header.seed,
        strategy: transcript.header.strategy.clone(),
        budget_fraction: transcript.header.budget_fraction,
    };
    run_protocol(book, &transcript.header.x, &mut adversary, &setup)
}
