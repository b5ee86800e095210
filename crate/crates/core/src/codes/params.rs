use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::CodeError;

/// Exact non-negative rational used for ε, budget fractions and thresholds.
pub type Rational = Ratio<u64>;

/// Parses `"1/10"`, `"0.1"` or `"3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, CodeError> {
    let s = s.trim();
    let bad = || CodeError::BadRational(s.to_string());
    if let Some((a, b)) = s.split_once('/') {
        let num: u64 = a.trim().parse().map_err(|_| bad())?;
        let den: u64 = b.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        return Ok(Rational::new(int * den + frac, den));
    }
    let v: u64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(v))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `⌈log2 v⌉` for `v ≥ 1`.
pub(crate) fn ceil_log2(v: u64) -> u32 {
    assert!(v >= 1);
    if v == 1 {
        0
    } else {
        64 - (v - 1).leading_zeros()
    }
}

fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// Largest field degree with a tabulated irreducible polynomial.
pub const MAX_FIELD_BITS: u32 = 24;

/// Every size the protocol needs, derived from `(n, ε)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolParams {
    pub n: usize,
    pub epsilon: Rational,
    /// Bits per outer symbol; also the segment width α.
    pub q: u32,
    /// Outer message symbols, `⌈n/q⌉`.
    pub k_outer: usize,
    /// Outer evaluation points; also the number of chunks per block.
    pub n_outer: usize,
    pub alpha: usize,
    pub m: usize,
    /// Bits of the index Alice learns, `log2 n`.
    pub ind_cap: usize,
    pub ind_len_bits: usize,
    /// Serialized inner message bits including the marker.
    pub inner_msg_bits: usize,
    pub k_in: usize,
    pub n_in: usize,
    /// Alice's per-chunk message length.
    pub p: usize,
    /// Bob's per-chunk message length, `3p/8`.
    pub bob_len: usize,
    /// Number of chunks.
    pub t: usize,
    /// Chunks per block, `m/α`.
    pub block_len: usize,
}

impl ProtocolParams {
    pub fn total_bits(&self) -> u64 {
        (self.t * (self.p + self.bob_len)) as u64
    }

    pub fn alice_bits(&self) -> u64 {
        (self.t * self.p) as u64
    }

    pub fn bob_bits(&self) -> u64 {
        (self.t * self.bob_len) as u64
    }

    /// Segment index used in the 1-based chunk `chunk_idx`.
    pub fn segment_of_chunk(&self, chunk_idx: usize) -> usize {
        (chunk_idx - 1) % self.block_len
    }

    pub fn block_bits(&self) -> usize {
        self.block_len * self.p
    }

    /// `erased < (1/2 − ε)·len`: unique decoding is guaranteed.
    pub fn below_unique_radius(&self, erased: usize, len: usize) -> bool {
        below_unique_radius(&self.epsilon, erased, len)
    }

    /// `erased ≥ (3/4 − 3/2·ε)·len`: an inner word is too erased to list decode.
    pub fn inner_too_erased(&self, erased: usize, len: usize) -> bool {
        inner_too_erased(&self.epsilon, erased, len)
    }

    /// `erased ≥ (3/4 − 9/4·ε)·len`: a block is too erased to list decode.
    pub fn block_too_erased(&self, erased: usize, len: usize) -> bool {
        let (a, d) = eps_parts(&self.epsilon);
        4 * d * erased as u128 >= (3 * d - 9 * a) * len as u128
    }

    /// Smallest erasure count that makes an inner word undecodable.
    pub fn inner_erasure_threshold(&self, len: usize) -> usize {
        let (a, d) = eps_parts(&self.epsilon);
        ceil_div((3 * d - 6 * a) * len as u128, 4 * d) as usize
    }

    /// Smallest erasure count that makes a block undecodable.
    pub fn block_erasure_threshold(&self, len: usize) -> usize {
        let (a, d) = eps_parts(&self.epsilon);
        ceil_div((3 * d - 9 * a) * len as u128, 4 * d) as usize
    }

    /// Largest number of equal segments two distinct outer codewords may share, `⌊ε·m/α⌋`.
    pub fn max_equal_segments(&self) -> usize {
        let (a, d) = eps_parts(&self.epsilon);
        ((a * self.n_outer as u128) / d) as usize
    }

    pub fn report(&self) -> ParamsReport {
        ParamsReport {
            n: self.n,
            epsilon: rational_to_f64(&self.epsilon),
            epsilon_exact: format_rational(&self.epsilon),
            q: self.q,
            big_n: self.n_outer,
            alpha: self.alpha,
            m: self.m,
            k_in: self.k_in,
            n_in: self.n_in,
            p: self.p,
            t: self.t,
            total_bits: self.total_bits(),
        }
    }
}

/// Parameter report emitted by `iecc params`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsReport {
    pub n: usize,
    pub epsilon: f64,
    #[serde(rename = "epsilonExact")]
    pub epsilon_exact: String,
    pub q: u32,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub alpha: usize,
    pub m: usize,
    pub k_in: usize,
    #[serde(rename = "N_in")]
    pub n_in: usize,
    pub p: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "totalBits")]
    pub total_bits: u64,
}

fn eps_parts(epsilon: &Rational) -> (u128, u128) {
    (*epsilon.numer() as u128, *epsilon.denom() as u128)
}

pub fn below_unique_radius(epsilon: &Rational, erased: usize, len: usize) -> bool {
    let (a, d) = eps_parts(epsilon);
    2 * d * (erased as u128) < (d - 2 * a) * len as u128
}

pub fn inner_too_erased(epsilon: &Rational, erased: usize, len: usize) -> bool {
    let (a, d) = eps_parts(epsilon);
    4 * d * erased as u128 >= (3 * d - 6 * a) * len as u128
}

/// Width of the length field for an index slot of `ind_cap` bits.
pub fn ind_len_bits(ind_cap: usize) -> usize {
    ceil_log2(ind_cap as u64 + 1) as usize
}

/// Number of inner evaluation points so that a nonzero message polynomial
/// vanishes on at most a `2ε` fraction of them.
pub fn inner_points(k_in: usize, epsilon: &Rational) -> u64 {
    let (a, d) = (*epsilon.numer() as u128, *epsilon.denom() as u128);
    ceil_div((k_in as u128 - 1) * d, 2 * a) as u64
}

pub fn check_epsilon(epsilon: &Rational) -> Result<(), CodeError> {
    if *epsilon.numer() == 0 || *epsilon > Rational::new(1, 8) {
        return Err(CodeError::EpsilonOutOfRange(format_rational(epsilon)));
    }
    Ok(())
}

pub fn derive_params(n: usize, epsilon: Rational) -> Result<ProtocolParams, CodeError> {
    check_epsilon(&epsilon)?;
    if !n.is_power_of_two() {
        return Err(CodeError::NotPowerOfTwo(n));
    }
    if n < 16 {
        return Err(CodeError::InputTooSmall(n));
    }
    let (a, d) = (*epsilon.numer() as u128, *epsilon.denom() as u128);
    let log_n = n.trailing_zeros();
    // ⌈log2(1/ε)⌉ = smallest t with a·2^t ≥ d
    let mut log_inv_eps = 0u32;
    while a << log_inv_eps < d {
        log_inv_eps += 1;
    }
    let q = log_n + log_inv_eps + 1;
    if q > MAX_FIELD_BITS {
        return Err(CodeError::FieldTooLarge(q));
    }
    let k_outer = n.div_ceil(q as usize);
    let n_outer = ceil_div(k_outer as u128 * d, a) as usize;
    if n_outer as u64 > 1u64 << q {
        return Err(CodeError::FieldTooLarge(q));
    }
    let alpha = q as usize;
    let m = n_outer * alpha;
    let block_len = n_outer;
    let t_raw = ceil_div(n_outer as u128 * d, a) as usize;
    let t = t_raw.div_ceil(block_len) * block_len;

    let ind_cap = log_n as usize;
    let len_bits = ind_len_bits(ind_cap);
    let inner_msg_bits = 1 + alpha + len_bits + ind_cap;
    if inner_msg_bits > 64 {
        return Err(CodeError::InnerMessageTooWide(inner_msg_bits));
    }
    let k_in = inner_msg_bits.div_ceil(8);
    let n_in = inner_points(k_in, &epsilon);
    if n_in > 256 || (n_in as usize) < k_in {
        return Err(CodeError::InnerPointsOutOfRange(n_in));
    }
    let n_in = n_in as usize;
    let p = 256 * n_in;
    Ok(ProtocolParams {
        n,
        epsilon,
        q,
        k_outer,
        n_outer,
        alpha,
        m,
        ind_cap,
        ind_len_bits: len_bits,
        inner_msg_bits,
        k_in,
        n_in,
        p,
        bob_len: 3 * p / 8,
        t,
        block_len,
    })
}
