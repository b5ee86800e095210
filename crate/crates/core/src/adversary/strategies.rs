use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf2::{BitVector, TriString};
use crate::protocol::{Alice, AliceMode, Phase};

use super::{prefix_mask, truncate_mask, Adversary, ChannelView, Direction};

/// Never erases anything.
#[derive(Clone, Debug, Default)]
pub struct NoNoise;

impl Adversary for NoNoise {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        BitVector::zeros(view.clean.len())
    }
}

/// Erases each bit independently with probability `rate` until the budget
/// runs out.
#[derive(Clone, Debug)]
pub struct IidRate {
    rate: f64,
    rng: ChaCha8Rng,
}

impl IidRate {
    pub fn new(rate: f64, seed: u64) -> Self {
        Self {
            rate: rate.clamp(0.0, 1.0),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Adversary for IidRate {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        let rate = self.rate;
        let rng = &mut self.rng;
        let mask = BitVector::from_fn(view.clean.len(), |_| rng.gen_bool(rate));
        truncate_mask(&mask, view.remaining)
    }
}

/// Erases every bit Bob sends while the budget lasts.
#[derive(Clone, Debug, Default)]
pub struct SilenceBob;

impl Adversary for SilenceBob {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        match view.direction {
            Direction::AliceToBob => BitVector::zeros(view.clean.len()),
            Direction::BobToAlice => prefix_mask(view.clean.len(), view.remaining),
        }
    }
}

/// Erases everything from the first chunk on until the budget runs out.
#[derive(Clone, Debug, Default)]
pub struct FrontLoad;

impl Adversary for FrontLoad {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        prefix_mask(view.clean.len(), view.remaining)
    }
}

/// Erases everything in both directions from chunk `from_chunk` on.
#[derive(Clone, Debug)]
pub struct TailErase {
    from_chunk: usize,
}

impl TailErase {
    pub fn new(from_chunk: usize) -> Self {
        Self { from_chunk }
    }
}

impl Adversary for TailErase {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        if view.chunk_idx < self.from_chunk {
            return BitVector::zeros(view.clean.len());
        }
        prefix_mask(view.clean.len(), view.remaining)
    }
}

/// Knobs for [`AnalysisGuided`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuidedProfile {
    /// Blocks spent just over the block threshold so Bob learns nothing.
    pub stall_blocks: usize,
    /// The decoy input is `x` with this bit flipped.
    pub decoy_bit: usize,
    /// Keep two thirds of each of Bob's Phase-1/2 messages erased.
    pub silence_bob: bool,
    /// Erase all of Alice's bits from this chunk on.
    pub tail_from: Option<usize>,
}

/// The attack the resilience argument charges for, made concrete.
///
/// Phase 0 is stalled for `stall_blocks` blocks with just enough erasures
/// per block, then one block is erased exactly where the encodings of `x`
/// and a decoy `x ⊕ e_t` differ, so Bob is left with the pair `{x, decoy}`.
/// From then on a shadow Alice holding the decoy is fed the same Bob
/// messages as the real one, and the positions where the two Alices'
/// messages differ are erased. Bob's messages are kept ambiguous so
/// neither Alice moves. Optionally everything Alice says after a chunk is
/// erased.
#[derive(Clone, Debug)]
pub struct AnalysisGuided {
    profile: GuidedProfile,
    decoy: Option<Alice>,
}

impl AnalysisGuided {
    pub fn new(profile: GuidedProfile) -> Self {
        Self {
            profile,
            decoy: None,
        }
    }

    fn decoy(&mut self, view: &ChannelView<'_>) -> &Alice {
        self.decoy.get_or_insert_with(|| {
            let mut y = view.x.clone();
            y.flip(self.profile.decoy_bit % y.len());
            Alice::new(view.book.clone(), y).expect("decoy has the input length")
        })
    }

    fn alice_mask(&mut self, view: &ChannelView<'_>) -> BitVector {
        let len = view.clean.len();
        let params = view.book.params();
        if self.profile.tail_from.is_some_and(|r| view.chunk_idx >= r) {
            return prefix_mask(len, view.remaining);
        }
        let block = (view.chunk_idx - 1) / params.block_len;
        if view.bob.phase() == Phase::P0 && block < self.profile.stall_blocks {
            let need = params.block_erasure_threshold(params.block_bits());
            return prefix_mask(len, need.div_ceil(params.block_len) as u64);
        }
        let chunk_idx = view.chunk_idx;
        let real_constant = view.alice.mode() != AliceMode::Encoding;
        let decoy = self.decoy(view);
        if view.bob.phase() == Phase::P2 && (real_constant || decoy.mode() != AliceMode::Encoding) {
            return prefix_mask(len, view.remaining);
        }
        view.clean.xor(&decoy.next_message(chunk_idx))
    }
}

impl Adversary for AnalysisGuided {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        let len = view.clean.len();
        if view.bob.xhat().is_some() {
            return BitVector::zeros(len);
        }
        let mask = match view.direction {
            Direction::AliceToBob => self.alice_mask(view),
            Direction::BobToAlice => {
                if self.profile.silence_bob && view.bob.phase() != Phase::P0 {
                    prefix_mask(len, (2 * len as u64).div_ceil(3))
                } else {
                    BitVector::zeros(len)
                }
            }
        };
        truncate_mask(&mask, view.remaining)
    }

    fn observe(&mut self, view: &ChannelView<'_>, received: &TriString) {
        if view.direction == Direction::BobToAlice {
            self.decoy(view);
            let decoy = self.decoy.as_mut().expect("just created");
            // A decoy that cannot parse a word the real Alice accepted simply
            // stops tracking; erasure-only delivery makes this unreachable.
            let _ = decoy.receive(received);
        }
    }
}

/// A randomly drawn mixture of bursts, background noise and the guided
/// attack, fully determined by its seed.
#[derive(Clone, Debug)]
pub struct RandomAdversary {
    rng: ChaCha8Rng,
    bursts: Vec<Burst>,
    noise: f64,
    guided: Option<AnalysisGuided>,
}

#[derive(Clone, Debug)]
struct Burst {
    from: usize,
    to: usize,
    alice: f64,
    bob: f64,
}

impl RandomAdversary {
    /// `chunks` is the protocol length `T`, `n` the input length.
    pub fn new(seed: u64, chunks: usize, block_len: usize, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let burst_count = rng.gen_range(0..4);
        let bursts = (0..burst_count)
            .map(|_| {
                let from = rng.gen_range(1..=chunks);
                let to = rng.gen_range(from..=chunks);
                Burst {
                    from,
                    to,
                    alice: rng.gen_range(0.0..1.0),
                    bob: rng.gen_range(0.0..1.0),
                }
            })
            .collect();
        let noise = if rng.gen_bool(0.5) {
            rng.gen_range(0.0..0.2)
        } else {
            0.0
        };
        let guided = rng.gen_bool(0.7).then(|| {
            let blocks = chunks / block_len;
            AnalysisGuided::new(GuidedProfile {
                stall_blocks: rng.gen_range(0..blocks.clamp(1, 3)),
                decoy_bit: rng.gen_range(0..n),
                silence_bob: rng.gen_bool(0.8),
                tail_from: rng.gen_bool(0.5).then(|| rng.gen_range(1..=chunks)),
            })
        });
        Self {
            rng,
            bursts,
            noise,
            guided,
        }
    }
}

impl Adversary for RandomAdversary {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        let len = view.clean.len();
        let mut mask = match &mut self.guided {
            Some(g) => g.decide(view),
            None => BitVector::zeros(len),
        };
        let mut rate = self.noise;
        for b in &self.bursts {
            if (b.from..=b.to).contains(&view.chunk_idx) {
                rate = rate.max(match view.direction {
                    Direction::AliceToBob => b.alice,
                    Direction::BobToAlice => b.bob,
                });
            }
        }
        if rate > 0.0 {
            let rng = &mut self.rng;
            let extra = BitVector::from_fn(len, |_| rng.gen_bool(rate)).and(&mask.not());
            mask.xor_assign(&extra);
        }
        truncate_mask(&mask, view.remaining)
    }

    fn observe(&mut self, view: &ChannelView<'_>, received: &TriString) {
        if let Some(g) = &mut self.guided {
            g.observe(view, received);
        }
    }
}

/// Plays back a recorded list of masks, alternating Alice then Bob per chunk.
#[derive(Clone, Debug)]
pub struct ReplayAdversary {
    masks: Vec<(BitVector, BitVector)>,
}

impl ReplayAdversary {
    pub fn new(masks: Vec<(BitVector, BitVector)>) -> Self {
        Self { masks }
    }
}

impl Adversary for ReplayAdversary {
    fn decide(&mut self, view: &ChannelView<'_>) -> BitVector {
        match self.masks.get(view.chunk_idx - 1) {
            Some((a, b)) => match view.direction {
                Direction::AliceToBob => a.clone(),
                Direction::BobToAlice => b.clone(),
            },
            None => BitVector::zeros(view.clean.len()),
        }
    }
}
