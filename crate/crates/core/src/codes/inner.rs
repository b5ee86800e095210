use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::gf2::{BitMatrix, BitVector, Eliminator, TriString};

use super::field::Gf2m;
use super::params::{ind_len_bits, inner_points, inner_too_erased};
use super::{CodeError, ProtocolParams, Rational};

const HADAMARD_LEN: usize = 256;
const HADAMARD_WORDS: usize = HADAMARD_LEN / 64;

/// A short string of index bits, most significant first.
///
/// Alice's `ind` and Bob's target index `i` both use this type: `ind` is a
/// prefix of `i` while the protocol is on track.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexBits {
    bits: Vec<bool>,
}

impl IndexBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// `value` written with `width` bits, most significant first.
    pub fn from_index(value: usize, width: usize) -> Self {
        Self {
            bits: (0..width).rev().map(|k| value >> k & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_prefix_of(&self, other: &IndexBits) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn to_index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
    }
}

impl fmt::Display for IndexBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for IndexBits {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CodeError::BadRational(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_bits)
    }
}

impl Serialize for IndexBits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IndexBits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Alice's chunk message: the current outer segment and her index prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InnerMessage {
    pub segment: BitVector,
    pub ind: IndexBits,
}

/// Bit layout of a serialized inner message.
///
/// Bit 0 is a constant marker `1`, bits `1..=α` carry the segment, the next
/// `len_bits` give `|ind|` (least significant first), then `ind_cap` bits hold
/// `ind` followed by zeros. The whole is padded with zeros to `8·k_in` bits.
/// The marker keeps every codeword away from the all-zero string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InnerLayout {
    pub alpha: usize,
    pub ind_cap: usize,
    pub len_bits: usize,
    pub msg_bits: usize,
    pub k_in: usize,
}

impl InnerLayout {
    pub fn new(alpha: usize, ind_cap: usize) -> Result<Self, CodeError> {
        let len_bits = ind_len_bits(ind_cap);
        let msg_bits = 1 + alpha + len_bits + ind_cap;
        if msg_bits > 64 {
            return Err(CodeError::InnerMessageTooWide(msg_bits));
        }
        Ok(Self {
            alpha,
            ind_cap,
            len_bits,
            msg_bits,
            k_in: msg_bits.div_ceil(8),
        })
    }

    /// Number of free serialized bits (everything but the marker).
    pub fn unknowns(&self) -> usize {
        self.msg_bits - 1
    }

    fn len_offset(&self) -> usize {
        1 + self.alpha
    }

    fn ind_offset(&self) -> usize {
        1 + self.alpha + self.len_bits
    }

    pub fn serialize(&self, msg: &InnerMessage) -> Result<u64, CodeError> {
        if msg.segment.len() != self.alpha {
            return Err(CodeError::LengthMismatch {
                expected: self.alpha,
                found: msg.segment.len(),
            });
        }
        if msg.ind.len() > self.ind_cap {
            return Err(CodeError::MalformedInd {
                len: msg.ind.len(),
                cap: self.ind_cap,
            });
        }
        let mut v = 1u64;
        for b in msg.segment.iter_ones() {
            v |= 1 << (1 + b);
        }
        v |= (msg.ind.len() as u64) << self.len_offset();
        for (k, &b) in msg.ind.bits().iter().enumerate() {
            if b {
                v |= 1 << (self.ind_offset() + k);
            }
        }
        Ok(v)
    }

    /// Inverse of [`serialize`](Self::serialize); `None` for words that no
    /// message serializes to.
    pub fn deserialize(&self, v: u64) -> Option<InnerMessage> {
        if v & 1 == 0 || (self.msg_bits < 64 && v >> self.msg_bits != 0) {
            return None;
        }
        let segment = BitVector::from_fn(self.alpha, |b| v >> (1 + b) & 1 == 1);
        let len = (v >> self.len_offset() & ((1 << self.len_bits) - 1)) as usize;
        if len > self.ind_cap {
            return None;
        }
        let ind_field = v >> self.ind_offset();
        if len < 64 && ind_field >> len != 0 {
            return None;
        }
        let ind = IndexBits::from_bits((0..len).map(|k| ind_field >> k & 1 == 1).collect());
        Some(InnerMessage { segment, ind })
    }
}

/// Result of list decoding one received inner word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InnerDecode {
    /// At least `(3/4 − 3/2·ε)·p` positions erased; nothing is inferred.
    TooErased,
    /// Every message or constant string consistent with the received word.
    /// `malformed` counts consistent codewords of the underlying linear code
    /// that are not serializations of any message; they are dropped.
    Candidates {
        list: Vec<Candidate>,
        malformed: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Candidate {
    Message(InnerMessage),
    /// The all-`b` string of length `p`, which Alice sends once she is done.
    Const(bool),
}

/// The inner code: Reed–Solomon over GF(256) at points `0..N_in`, each
/// symbol expanded by the Hadamard code to 256 bits.
///
/// Symbol `t` is `Σ byte_c · t^c` where `byte_c` is byte `c` of the
/// serialized message. Bit `a` of the Hadamard expansion of `s` is the
/// parity of `a & s`.
#[derive(Clone, Debug)]
pub struct InnerCode {
    layout: InnerLayout,
    epsilon: Rational,
    n_in: usize,
    field: Gf2m,
    hadamard: Vec<[u64; HADAMARD_WORDS]>,
    /// `symbol_rows[t][r]`: serialized bits whose sum is bit `r` of symbol `t`.
    symbol_rows: Vec<[u64; 8]>,
    generator: BitMatrix,
    offset: BitVector,
}

impl InnerCode {
    pub fn new(layout: InnerLayout, epsilon: Rational) -> Result<Self, CodeError> {
        let n_in = inner_points(layout.k_in, &epsilon);
        if n_in > 256 || n_in < layout.k_in as u64 {
            return Err(CodeError::InnerPointsOutOfRange(n_in));
        }
        let n_in = n_in as usize;
        let field = Gf2m::new(8);
        let hadamard = (0..HADAMARD_LEN)
            .map(|s| {
                let mut w = [0u64; HADAMARD_WORDS];
                for a in 0..HADAMARD_LEN {
                    if (a & s).count_ones() % 2 == 1 {
                        w[a / 64] |= 1 << (a % 64);
                    }
                }
                w
            })
            .collect();
        let used = if layout.msg_bits == 64 {
            u64::MAX
        } else {
            (1u64 << layout.msg_bits) - 1
        };
        let symbol_rows = (0..n_in as u32)
            .map(|z| {
                let mut rows = [0u64; 8];
                let mut pow = 1u32;
                for c in 0..layout.k_in {
                    for b in 0..8 {
                        let u = 8 * c + b;
                        let contrib = field.mul(1 << b, pow);
                        for (r, row) in rows.iter_mut().enumerate() {
                            if contrib >> r & 1 == 1 {
                                *row |= 1 << u;
                            }
                        }
                    }
                    pow = field.mul(pow, z);
                }
                rows.map(|row| row & used)
            })
            .collect();
        let mut code = Self {
            layout,
            epsilon,
            n_in,
            field,
            hadamard,
            symbol_rows,
            generator: BitMatrix::zeros(0, 0),
            offset: BitVector::zeros(0),
        };
        let columns: Vec<BitVector> = (1..layout.msg_bits)
            .map(|u| code.encode_serialized(1 << u))
            .collect();
        code.generator = BitMatrix::from_columns(code.len(), &columns)
            .expect("columns have the codeword length");
        code.offset = code.encode_serialized(1);
        Ok(code)
    }

    pub fn from_params(params: &ProtocolParams) -> Result<Self, CodeError> {
        Self::new(
            InnerLayout::new(params.alpha, params.ind_cap)?,
            params.epsilon,
        )
    }

    pub fn layout(&self) -> &InnerLayout {
        &self.layout
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn points(&self) -> usize {
        self.n_in
    }

    /// Codeword length `p = 256·N_in`.
    pub fn len(&self) -> usize {
        self.n_in * HADAMARD_LEN
    }

    pub fn is_empty(&self) -> bool {
        self.n_in == 0
    }

    /// Linear part of the encoder, acting on serialized bits `1..msg_bits`.
    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// Encoding of the marker alone; every codeword is `G·u ⊕ offset`.
    pub fn offset(&self) -> &BitVector {
        &self.offset
    }

    pub fn hadamard(&self, s: u8) -> BitVector {
        BitVector::from_words(HADAMARD_LEN, self.hadamard[s as usize].to_vec())
    }

    pub fn encode(&self, msg: &InnerMessage) -> Result<BitVector, CodeError> {
        Ok(self.encode_serialized(self.layout.serialize(msg)?))
    }

    /// Encodes a raw serialized word. Linear in `v`.
    pub fn encode_serialized(&self, v: u64) -> BitVector {
        let coeffs: Vec<u32> = (0..self.layout.k_in)
            .map(|c| (v >> (8 * c) & 0xFF) as u32)
            .collect();
        let mut words = Vec::with_capacity(self.n_in * HADAMARD_WORDS);
        for z in 0..self.n_in as u32 {
            let s = self.field.eval(&coeffs, z);
            words.extend_from_slice(&self.hadamard[s as usize]);
        }
        BitVector::from_words(self.len(), words)
    }

    pub fn too_erased(&self, received: &TriString) -> bool {
        inner_too_erased(&self.epsilon, received.erased_count(), received.len())
    }

    /// Feeds `sink` a set of equations `row · v = rhs` on the serialized
    /// message `v` (marker included) that is equivalent to agreeing with
    /// `received` on every unerased position. Returns `false` as soon as a
    /// Hadamard block is inconsistent with every symbol, or when `sink` does.
    pub(crate) fn reduce(
        &self,
        received: &TriString,
        mut sink: impl FnMut(u64, bool) -> bool,
    ) -> bool {
        debug_assert_eq!(received.len(), self.len());
        let vals = received.values().words();
        let erased = received.erasures().words();
        for t in 0..self.n_in {
            let range = t * HADAMARD_WORDS..(t + 1) * HADAMARD_WORDS;
            if !self.reduce_block(t, &vals[range.clone()], &erased[range], &mut sink) {
                return false;
            }
        }
        true
    }

    fn reduce_block(
        &self,
        t: usize,
        vals: &[u64],
        erased: &[u64],
        sink: &mut impl FnMut(u64, bool) -> bool,
    ) -> bool {
        // basis[c] has lowest set bit c; zero marks an empty slot.
        let mut basis = [0u8; 8];
        let mut brhs = [false; 8];
        let mut rank = 0;
        'scan: for w in 0..HADAMARD_WORDS {
            let mut present = !erased[w];
            while present != 0 {
                let bit = present.trailing_zeros();
                present &= present - 1;
                let mut a = (w * 64 + bit as usize) as u8;
                let mut v = vals[w] >> bit & 1 == 1;
                loop {
                    if a == 0 {
                        if v {
                            return false;
                        }
                        break;
                    }
                    let c = a.trailing_zeros() as usize;
                    if basis[c] == 0 {
                        basis[c] = a;
                        brhs[c] = v;
                        rank += 1;
                        break;
                    }
                    a ^= basis[c];
                    v ^= brhs[c];
                }
                if rank == 8 {
                    break 'scan;
                }
            }
        }
        let rows = &self.symbol_rows[t];
        if rank == 8 {
            let mut s = 0u8;
            for c in (0..8).rev() {
                let rest = basis[c] & !(1 << c) & s;
                if brhs[c] ^ (rest.count_ones() % 2 == 1) {
                    s |= 1 << c;
                }
            }
            let h = &self.hadamard[s as usize];
            if (0..HADAMARD_WORDS).any(|w| (h[w] ^ vals[w]) & !erased[w] != 0) {
                return false;
            }
            (0..8).all(|r| sink(rows[r], s >> r & 1 == 1))
        } else {
            (0..8).filter(|&c| basis[c] != 0).all(|c| {
                let mut a = basis[c];
                let mut row = 0u64;
                while a != 0 {
                    row ^= rows[a.trailing_zeros() as usize];
                    a &= a - 1;
                }
                sink(row, brhs[c])
            })
        }
    }

    /// All serialized words (marker set) consistent with `received`, or
    /// `Err(count)` when there are more than `cap`.
    pub fn consistent_words(&self, received: &TriString, cap: usize) -> Result<Vec<u64>, usize> {
        let mut elim = Eliminator::new(self.layout.unknowns());
        let ok = self.reduce(received, |row, rhs| {
            elim.push(&[row >> 1], rhs ^ (row & 1 == 1))
        });
        if !ok {
            return Ok(Vec::new());
        }
        match elim.finish().enumerate(cap) {
            Ok(sols) => Ok(sols.iter().map(|u| u.to_u64() << 1 | 1).collect()),
            Err(too_many) => Err(1usize
                .checked_shl(too_many.dim as u32)
                .unwrap_or(usize::MAX)),
        }
    }

    /// List decodes `received` against all messages and the two constant
    /// strings. More than two candidates means the code parameters do not
    /// support list decoding at this erasure level and is reported as an
    /// error.
    pub fn list_decode(&self, received: &TriString) -> Result<InnerDecode, CodeError> {
        if received.len() != self.len() {
            return Err(CodeError::LengthMismatch {
                expected: self.len(),
                found: received.len(),
            });
        }
        if self.too_erased(received) {
            return Ok(InnerDecode::TooErased);
        }
        let words = self
            .consistent_words(received, 2)
            .map_err(CodeError::InternalListOverflow)?;
        let mut list = Vec::new();
        let mut malformed = 0;
        for v in words {
            match self.layout.deserialize(v) {
                Some(msg) => list.push(Candidate::Message(msg)),
                None => malformed += 1,
            }
        }
        for b in [false, true] {
            if received.all_unerased_equal(b) {
                list.push(Candidate::Const(b));
            }
        }
        if list.len() + malformed > 2 {
            return Err(CodeError::InternalListOverflow(list.len() + malformed));
        }
        Ok(InnerDecode::Candidates { list, malformed })
    }
}
