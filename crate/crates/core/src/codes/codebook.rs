use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf2::BitVector;

use super::block::BlockCode;
use super::inner::{IndexBits, InnerCode, InnerMessage};
use super::outer::{bad_set_of_codewords, OuterCode};
use super::{CodeError, ProtocolParams};

const AUDIT_SAMPLES: usize = 256;
const AUDIT_SEED: u64 = 0x5eed_c0de;

/// All codes for one parameter set, built once and shared read-only.
#[derive(Clone, Debug)]
pub struct Codebook {
    params: ProtocolParams,
    block: BlockCode,
}

/// Sampled distance figures checked before a codebook is handed out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuickAudit {
    pub samples: usize,
    pub min_pair_distance: usize,
    pub min_distance_to_zero: usize,
    pub min_distance_to_one: usize,
    pub max_equal_segments: usize,
}

impl QuickAudit {
    /// Checks the sampled minima against `(1/2 − ε)·p` and the outer bound.
    pub fn check(&self, params: &ProtocolParams) -> Result<(), CodeError> {
        let worst = self
            .min_pair_distance
            .min(self.min_distance_to_zero)
            .min(self.min_distance_to_one);
        let (a, den) = (
            *params.epsilon.numer() as u128,
            *params.epsilon.denom() as u128,
        );
        if 2 * den * (worst as u128) < (den - 2 * a) * params.p as u128 {
            return Err(CodeError::AuditFailed(format!(
                "inner distance {worst} below (1/2 - eps)*{}",
                params.p
            )));
        }
        if self.max_equal_segments > params.max_equal_segments() {
            return Err(CodeError::AuditFailed(format!(
                "{} equal outer segments, bound is {}",
                self.max_equal_segments,
                params.max_equal_segments()
            )));
        }
        Ok(())
    }
}

impl Codebook {
    /// Builds the codes and refuses to return them if a sampled distance
    /// audit fails.
    pub fn new(params: ProtocolParams) -> Result<Self, CodeError> {
        let book = Self::unchecked(params)?;
        book.quick_audit(AUDIT_SAMPLES, AUDIT_SEED)
            .check(&book.params)?;
        Ok(book)
    }

    pub(crate) fn unchecked(params: ProtocolParams) -> Result<Self, CodeError> {
        let outer = OuterCode::from_params(&params)?;
        let inner = InnerCode::from_params(&params)?;
        let block = BlockCode::new(outer, inner)?;
        Ok(Self { params, block })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn outer(&self) -> &OuterCode {
        self.block.outer()
    }

    pub fn inner(&self) -> &InnerCode {
        self.block.inner()
    }

    pub fn block(&self) -> &BlockCode {
        &self.block
    }

    pub fn random_inner_message(&self, rng: &mut impl Rng) -> InnerMessage {
        let len = rng.gen_range(0..=self.params.ind_cap);
        InnerMessage {
            segment: BitVector::random(self.params.alpha, rng),
            ind: IndexBits::from_bits((0..len).map(|_| rng.gen()).collect()),
        }
    }

    pub fn quick_audit(&self, samples: usize, seed: u64) -> QuickAudit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = self.params.p;
        let inner = self.inner();
        let mut audit = QuickAudit {
            samples,
            min_pair_distance: p,
            min_distance_to_zero: p,
            min_distance_to_one: p,
            max_equal_segments: 0,
        };
        for _ in 0..samples {
            let a = self.random_inner_message(&mut rng);
            let b = self.random_inner_message(&mut rng);
            let ca = inner.encode(&a).expect("sampled messages are well formed");
            let weight = ca.count_ones();
            audit.min_distance_to_zero = audit.min_distance_to_zero.min(weight);
            audit.min_distance_to_one = audit.min_distance_to_one.min(p - weight);
            if a != b {
                let cb = inner.encode(&b).expect("sampled messages are well formed");
                audit.min_pair_distance = audit.min_pair_distance.min(ca.hamming_distance(&cb));
            }
            let x = BitVector::random(self.params.n, &mut rng);
            let y = BitVector::random(self.params.n, &mut rng);
            if x != y {
                let cx = self.outer().encode(&x).expect("length n");
                let cy = self.outer().encode(&y).expect("length n");
                let equal = bad_set_of_codewords(&cx, &cy, self.params.alpha).len();
                audit.max_equal_segments = audit.max_equal_segments.max(equal);
            }
        }
        audit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{derive_params, Rational};

    #[test]
    fn default_profile_passes_its_audit() {
        let book = Codebook::new(derive_params(256, Rational::new(1, 10)).unwrap()).unwrap();
        let audit = book.quick_audit(64, 1);
        assert!(audit.min_pair_distance >= 1536);
        assert!(audit.min_distance_to_one >= 1920);
    }

    #[test]
    fn audit_rejects_short_distance() {
        let params = derive_params(64, Rational::new(1, 10)).unwrap();
        let bad = QuickAudit {
            samples: 1,
            min_pair_distance: params.p / 4,
            min_distance_to_zero: params.p,
            min_distance_to_one: params.p,
            max_equal_segments: 0,
        };
        assert!(matches!(bad.check(&params), Err(CodeError::AuditFailed(_))));
    }
}
