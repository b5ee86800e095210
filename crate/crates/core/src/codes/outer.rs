use crate::gf2::{BitMatrix, BitVector};

use super::field::Gf2m;
use super::{CodeError, ProtocolParams};

/// Reed–Solomon code over GF(2^q) viewed as a GF(2)-linear map
/// `{0,1}^n → {0,1}^{N·q}`.
///
/// Input bit `i·q + b` is bit `b` of message symbol `i` (zero padded), output
/// segment `t` is the evaluation of the message polynomial at `points[t]`.
/// Two distinct inputs give polynomials whose difference has at most `k − 1`
/// roots, so at most `k − 1` segments coincide.
#[derive(Clone, Debug)]
pub struct OuterCode {
    field: Gf2m,
    n_bits: usize,
    k: usize,
    points: Vec<u32>,
    generator: BitMatrix,
}

impl OuterCode {
    pub fn new(q: u32, n_bits: usize, points: Vec<u32>) -> Result<Self, CodeError> {
        let field = Gf2m::new(q);
        let k = n_bits.div_ceil(q as usize);
        let mut sorted = points.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() || points.iter().any(|&z| z as u64 >= field.size()) {
            return Err(CodeError::BadEvaluationPoints);
        }
        if points.len() < k {
            return Err(CodeError::BadEvaluationPoints);
        }
        let generator = Self::build_generator(&field, n_bits, k, &points);
        Ok(Self {
            field,
            n_bits,
            k,
            points,
            generator,
        })
    }

    pub fn from_params(params: &ProtocolParams) -> Result<Self, CodeError> {
        let points = (0..params.n_outer as u32).collect();
        Self::new(params.q, params.n, points)
    }

    fn build_generator(field: &Gf2m, n_bits: usize, k: usize, points: &[u32]) -> BitMatrix {
        let q = field.bits() as usize;
        let mut g = BitMatrix::zeros(points.len() * q, n_bits);
        for (t, &z) in points.iter().enumerate() {
            let mut pow = 1u32;
            for i in 0..k {
                let mut v = pow;
                for b in 0..q {
                    let col = i * q + b;
                    if col < n_bits {
                        let mut bits = v;
                        while bits != 0 {
                            let r = bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            g.set(t * q + r, col, true);
                        }
                    }
                    v = field.mul_x(v);
                }
                pow = field.mul(pow, z);
            }
        }
        g
    }

    pub fn input_bits(&self) -> usize {
        self.n_bits
    }

    pub fn alpha(&self) -> usize {
        self.field.bits() as usize
    }

    pub fn segments(&self) -> usize {
        self.points.len()
    }

    pub fn output_bits(&self) -> usize {
        self.segments() * self.alpha()
    }

    pub fn message_symbols(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn encode(&self, x: &BitVector) -> Result<BitVector, CodeError> {
        if x.len() != self.n_bits {
            return Err(CodeError::LengthMismatch {
                expected: self.n_bits,
                found: x.len(),
            });
        }
        let q = self.alpha();
        let coeffs: Vec<u32> = (0..self.k)
            .map(|i| {
                (0..q)
                    .filter(|&b| i * q + b < self.n_bits && x.get(i * q + b))
                    .fold(0u32, |acc, b| acc | 1 << b)
            })
            .collect();
        let mut out = BitVector::zeros(self.output_bits());
        for (t, &z) in self.points.iter().enumerate() {
            let s = self.field.eval(&coeffs, z);
            for b in 0..q {
                if s >> b & 1 == 1 {
                    out.set(t * q + b, true);
                }
            }
        }
        Ok(out)
    }

    /// Bits `[jα, (j+1)α)` of an encoded word.
    pub fn segment(&self, codeword: &BitVector, j: usize) -> Result<BitVector, CodeError> {
        if codeword.len() != self.output_bits() {
            return Err(CodeError::LengthMismatch {
                expected: self.output_bits(),
                found: codeword.len(),
            });
        }
        if j >= self.segments() {
            return Err(CodeError::SegmentOutOfRange {
                index: j,
                segments: self.segments(),
            });
        }
        Ok(codeword.slice(j * self.alpha(), self.alpha()))
    }

    /// Segment indices on which the encodings of `x0` and `x1` coincide.
    pub fn bad_set(&self, x0: &BitVector, x1: &BitVector) -> Result<Vec<usize>, CodeError> {
        if x0 == x1 {
            return Err(CodeError::IdenticalInputs);
        }
        let c0 = self.encode(x0)?;
        let c1 = self.encode(x1)?;
        Ok(bad_set_of_codewords(&c0, &c1, self.alpha()))
    }
}

pub(crate) fn bad_set_of_codewords(c0: &BitVector, c1: &BitVector, alpha: usize) -> Vec<usize> {
    (0..c0.len() / alpha)
        .filter(|&j| c0.slice(j * alpha, alpha) == c1.slice(j * alpha, alpha))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{derive_params, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> OuterCode {
        OuterCode::from_params(&derive_params(64, Rational::new(1, 10)).unwrap()).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let c = small();
        assert!(c.encode(&BitVector::zeros(64)).unwrap().is_zero());
    }

    #[test]
    fn encode_matches_generator() {
        let c = small();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = BitVector::random(64, &mut rng);
            assert_eq!(
                c.encode(&x).unwrap(),
                c.generator().mat_vec_mul(&x).unwrap()
            );
        }
    }

    #[test]
    fn segments_partition_the_codeword() {
        let c = small();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ct = c.encode(&BitVector::random(64, &mut rng)).unwrap();
        let segs: Vec<_> = (0..c.segments())
            .map(|j| c.segment(&ct, j).unwrap())
            .collect();
        assert_eq!(segs[0], ct.slice(0, c.alpha()));
        assert_eq!(
            segs[c.segments() - 1],
            ct.slice(ct.len() - c.alpha(), c.alpha())
        );
        assert_eq!(BitVector::concat(&segs), ct);
        assert!(matches!(
            c.segment(&ct, c.segments()),
            Err(CodeError::SegmentOutOfRange { .. })
        ));
    }

    #[test]
    fn hand_built_two_symbol_code() {
        // q = 2, two message symbols, points {0,1,2,3}.
        // x0 = (0, 0) → f = 0; x1 = (1, 1) → g = 1 + z; g(1) = 0 = f(1).
        let c = OuterCode::new(2, 4, vec![0, 1, 2, 3]).unwrap();
        let x0: BitVector = "0000".parse().unwrap();
        let x1: BitVector = "1010".parse().unwrap();
        assert_eq!(c.bad_set(&x0, &x1).unwrap(), vec![1]);
        assert!(matches!(
            c.bad_set(&x0, &x0),
            Err(CodeError::IdenticalInputs)
        ));
    }

    #[test]
    fn rejects_repeated_points() {
        assert!(OuterCode::new(4, 8, vec![1, 1, 2]).is_err());
        assert!(OuterCode::new(2, 8, vec![0, 1, 2, 3, 4]).is_err());
    }
}
