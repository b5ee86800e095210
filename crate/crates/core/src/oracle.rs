//! Brute-force references for the fast decoders, and a randomized search
//! for inputs and erasure patterns that make the protocol fail.

use std::sync::Arc;

use rayon::prelude::*;

use crate::adversary::{default_suite, StrategySpec};
use crate::codes::{CodeError, Codebook, InnerCode, InnerLayout, Rational};
use crate::gf2::{BitVector, TriString};
use crate::protocol::{run_protocol, ProtocolError, RunSetup, Transcript};

/// Largest message space the exhaustive tools accept.
pub const MAX_TABLE_BITS: usize = 16;

/// Every codeword of a small code, with the label it encodes.
#[derive(Clone, Debug)]
pub struct TinyCodeTable {
    entries: Vec<(u64, BitVector)>,
}

/// Exact minimum distances of a tabulated code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinDistances {
    pub pairwise: usize,
    pub to_zero: usize,
    pub to_one: usize,
}

impl MinDistances {
    /// All three minima are at least `(1/2 − ε)·len`.
    pub fn meets_bound(&self, epsilon: &Rational, len: usize) -> bool {
        let (a, d) = (*epsilon.numer() as u128, *epsilon.denom() as u128);
        let worst = self.pairwise.min(self.to_zero).min(self.to_one) as u128;
        2 * d * worst >= (d - 2 * a) * len as u128
    }
}

impl TinyCodeTable {
    pub fn from_codewords(entries: Vec<(u64, BitVector)>) -> Self {
        Self { entries }
    }

    /// All well-formed messages of `code`, labelled by their serialization.
    pub fn of_inner(code: &InnerCode) -> Result<Self, CodeError> {
        let layout = code.layout();
        if layout.unknowns() > MAX_TABLE_BITS {
            return Err(CodeError::InnerMessageTooWide(layout.msg_bits));
        }
        let entries = (0..1u64 << layout.unknowns())
            .map(|u| u << 1 | 1)
            .filter(|&v| layout.deserialize(v).is_some())
            .map(|v| (v, code.encode_serialized(v)))
            .collect();
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, BitVector)] {
        &self.entries
    }

    /// Labels of every codeword that agrees with `received` on all unerased
    /// positions, in table order.
    pub fn brute_list_decode(&self, received: &TriString) -> Vec<u64> {
        self.entries
            .iter()
            .filter(|(_, w)| received.is_consistent_with(w))
            .map(|&(label, _)| label)
            .collect()
    }

    pub fn exhaustive_min_distance(&self) -> MinDistances {
        let len = self.entries.first().map_or(0, |(_, w)| w.len());
        let mut out = MinDistances {
            pairwise: len,
            to_zero: len,
            to_one: len,
        };
        for (k, (_, a)) in self.entries.iter().enumerate() {
            let weight = a.count_ones();
            out.to_zero = out.to_zero.min(weight);
            out.to_one = out.to_one.min(len - weight);
            for (_, b) in &self.entries[k + 1..] {
                out.pairwise = out.pairwise.min(a.hamming_distance(b));
            }
        }
        out
    }
}

/// The inner code shrunk to a 6-bit segment and a 3-bit index slot, small
/// enough to enumerate (11 free message bits).
pub fn reduced_inner_code(epsilon: Rational) -> Result<InnerCode, CodeError> {
    InnerCode::new(InnerLayout::new(6, 3)?, epsilon)
}

#[derive(Clone, Debug)]
pub enum AttackOutcome {
    NoneFound { runs: usize },
    Counterexample(Box<Transcript>),
}

/// Runs the bundled strategies and then `tries` random adversaries on `x`,
/// returning the first failing transcript in that order. `inspect` sees
/// every transcript (used to audit them as they stream past).
pub fn attack_search(
    book: &Arc<Codebook>,
    x: &BitVector,
    budget_fraction: Rational,
    tries: usize,
    seed: u64,
    inspect: &(dyn Fn(&Transcript) + Sync),
) -> Result<AttackOutcome, ProtocolError> {
    let params = book.params();
    let mut specs: Vec<(StrategySpec, u64)> = default_suite(params)
        .into_iter()
        .map(|s| (s, seed))
        .collect();
    specs.extend((0..tries as u64).map(|k| {
        (
            StrategySpec::RandomSearch {
                seed: seed.wrapping_add(k),
                tries: 1,
            },
            0,
        )
    }));
    let runs = specs.len();
    let found = specs
        .par_iter()
        .map(
            |(spec, trial_seed)| -> Result<Option<Transcript>, ProtocolError> {
                let mut adversary = spec.build(params, *trial_seed);
                let setup = RunSetup {
                    seed: *trial_seed,
                    strategy: spec.label(),
                    budget_fraction,
                };
                let t = run_protocol(book, x, adversary.as_mut(), &setup)?;
                inspect(&t);
                Ok((!t.success()).then_some(t))
            },
        )
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        None => Ok(AttackOutcome::NoneFound { runs }),
        Some(Ok(Some(t))) => Ok(AttackOutcome::Counterexample(Box::new(t))),
        Some(Ok(None)) => unreachable!("filtered above"),
        Some(Err(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::derive_params;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn repetition_code_distances() {
        let table =
            TinyCodeTable::from_codewords(vec![(0, BitVector::zeros(7)), (1, BitVector::ones(7))]);
        let d = table.exhaustive_min_distance();
        assert_eq!(d.pairwise, 7);
        assert_eq!((d.to_zero, d.to_one), (0, 0));
        assert!(!d.meets_bound(&Rational::new(1, 10), 7));
        let only_pair = MinDistances {
            pairwise: 4,
            to_zero: 4,
            to_one: 4,
        };
        assert!(only_pair.meets_bound(&Rational::new(1, 10), 10));
        assert!(!only_pair.meets_bound(&Rational::new(1, 20), 10));
    }

    #[test]
    fn reduced_table_brute_decode_basics() {
        let code = reduced_inner_code(Rational::new(1, 10)).unwrap();
        let table = TinyCodeTable::of_inner(&code).unwrap();
        // 64 segments × (1 + 2 + 4 + 8) index strings
        assert_eq!(table.len(), 960);
        let (label, word) = table.entries()[17].clone();
        assert_eq!(
            table.brute_list_decode(&TriString::unerased(&word)),
            vec![label]
        );
        assert_eq!(
            table
                .brute_list_decode(&TriString::all_erased(code.len()))
                .len(),
            960
        );
    }

    #[test]
    fn brute_decode_agrees_with_solver_on_random_masks() {
        let code = reduced_inner_code(Rational::new(1, 10)).unwrap();
        let table = TinyCodeTable::of_inner(&code).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let (_, word) = &table.entries()[rng.gen_range(0..table.len())];
            let rate = rng.gen_range(0.0..1.0);
            let mask = BitVector::from_fn(code.len(), |_| rng.gen_bool(rate));
            let r = TriString::with_mask(word, &mask).unwrap();
            let brute = table.brute_list_decode(&r);
            let mut fast: Vec<u64> = code
                .consistent_words(&r, 1 << 12)
                .unwrap()
                .into_iter()
                .filter(|&v| code.layout().deserialize(v).is_some())
                .collect();
            fast.sort_unstable();
            assert_eq!(brute, fast);
        }
    }

    #[test]
    fn attack_search_extremes() {
        let book =
            Arc::new(Codebook::new(derive_params(16, Rational::new(1, 10)).unwrap()).unwrap());
        let x = BitVector::from_fn(16, |i| i % 3 == 0);
        let none = attack_search(&book, &x, Rational::from_integer(0), 3, 1, &|_| {}).unwrap();
        assert!(matches!(none, AttackOutcome::NoneFound { runs: 14 }));
        let all = attack_search(&book, &x, Rational::from_integer(1), 0, 1, &|_| {}).unwrap();
        assert!(matches!(all, AttackOutcome::Counterexample(_)));
    }
}
