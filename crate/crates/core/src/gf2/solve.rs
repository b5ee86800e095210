use super::bitvec::{parity_and, words_for, WORD_BITS};
use super::{BitMatrix, BitVector, Gf2Error, TriString};

const NO_SLOT: u32 = u32::MAX;

/// Incremental Gaussian elimination over GF(2) for systems `A·v = b`.
///
/// Rows are pushed one at a time and reduced against an echelon basis keyed
/// by each basis row's lowest set bit. Once the rank reaches the number of
/// unknowns the unique solution is fixed and later rows are only checked
/// for consistency.
pub struct Eliminator {
    cols: usize,
    stride: usize,
    basis: Vec<u64>,
    rhs: Vec<bool>,
    pivot_of_slot: Vec<usize>,
    slot_of_col: Vec<u32>,
    scratch: Vec<u64>,
    consistent: bool,
    solution: Option<BitVector>,
}

impl Eliminator {
    pub fn new(cols: usize) -> Self {
        let stride = words_for(cols).max(1);
        Self {
            cols,
            stride,
            basis: Vec::new(),
            rhs: Vec::new(),
            pivot_of_slot: Vec::new(),
            slot_of_col: vec![NO_SLOT; cols],
            scratch: vec![0; stride],
            consistent: true,
            solution: if cols == 0 {
                Some(BitVector::zeros(0))
            } else {
                None
            },
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.pivot_of_slot.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Adds the equation `row · v = rhs`. Returns whether the system is
    /// still consistent.
    pub fn push(&mut self, row: &[u64], rhs: bool) -> bool {
        debug_assert!(row.len() >= words_for(self.cols));
        if !self.consistent {
            return false;
        }
        if let Some(sol) = &self.solution {
            if parity_and(row, sol.words()) != rhs {
                self.consistent = false;
            }
            return self.consistent;
        }
        let stride = self.stride;
        self.scratch[..stride].copy_from_slice(&row[..stride]);
        let mut b = rhs;
        let mut wi = 0;
        loop {
            while wi < stride && self.scratch[wi] == 0 {
                wi += 1;
            }
            if wi == stride {
                if b {
                    self.consistent = false;
                }
                return self.consistent;
            }
            let c = wi * WORD_BITS + self.scratch[wi].trailing_zeros() as usize;
            let slot = self.slot_of_col[c];
            if slot == NO_SLOT {
                let s = self.pivot_of_slot.len();
                self.slot_of_col[c] = s as u32;
                self.pivot_of_slot.push(c);
                self.rhs.push(b);
                self.basis.extend_from_slice(&self.scratch[..stride]);
                if self.rank() == self.cols {
                    let (p, _) = self.back_substitute();
                    self.solution = Some(p);
                }
                return true;
            }
            let s = slot as usize;
            let base = s * stride;
            for k in wi..stride {
                self.scratch[k] ^= self.basis[base + k];
            }
            b ^= self.rhs[s];
        }
    }

    /// The reduced rows pushed so far, each with its right-hand side. They
    /// span the same constraints as every consistent row pushed.
    pub fn basis_rows(&self) -> impl Iterator<Item = (&[u64], bool)> + '_ {
        self.basis
            .chunks_exact(self.stride)
            .zip(self.rhs.iter().copied())
    }

    /// Particular solution (free variables zero) and the list of free columns.
    fn back_substitute(&self) -> (BitVector, Vec<usize>) {
        let mut v = BitVector::zeros(self.cols);
        let mut words = vec![0u64; self.stride];
        let mut free = Vec::new();
        for c in (0..self.cols).rev() {
            let slot = self.slot_of_col[c];
            if slot == NO_SLOT {
                free.push(c);
                continue;
            }
            let s = slot as usize;
            let row = &self.basis[s * self.stride..(s + 1) * self.stride];
            let bit = self.rhs[s] ^ parity_and(row, &words);
            if bit {
                words[c / WORD_BITS] |= 1 << (c % WORD_BITS);
            }
        }
        free.reverse();
        for c in 0..self.cols {
            if (words[c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1 {
                v.set(c, true);
            }
        }
        (v, free)
    }

    fn null_vector(&self, free_col: usize) -> BitVector {
        let mut words = vec![0u64; self.stride];
        words[free_col / WORD_BITS] |= 1 << (free_col % WORD_BITS);
        for c in (0..self.cols).rev() {
            let slot = self.slot_of_col[c];
            if slot == NO_SLOT {
                continue;
            }
            let s = slot as usize;
            let row = &self.basis[s * self.stride..(s + 1) * self.stride];
            if parity_and(row, &words) {
                words[c / WORD_BITS] |= 1 << (c % WORD_BITS);
            }
        }
        BitVector::from_words(self.cols, words)
    }

    pub fn finish(self) -> SolutionSpace {
        if !self.consistent {
            return SolutionSpace::empty(self.cols);
        }
        let (particular, free) = match &self.solution {
            Some(sol) => (sol.clone(), Vec::new()),
            None => self.back_substitute(),
        };
        let null_basis = free.iter().map(|&f| self.null_vector(f)).collect();
        SolutionSpace {
            cols: self.cols,
            particular: Some(particular),
            null_basis,
            free_cols: free,
        }
    }
}

/// All solutions of an affine GF(2) system: `particular ⊕ span(null_basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    cols: usize,
    particular: Option<BitVector>,
    null_basis: Vec<BitVector>,
    free_cols: Vec<usize>,
}

/// More solutions exist than the caller allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("solution space of dimension {dim} exceeds cap {cap}")]
pub struct TooMany {
    pub dim: usize,
    pub cap: usize,
}

impl SolutionSpace {
    pub fn empty(cols: usize) -> Self {
        Self {
            cols,
            particular: None,
            null_basis: Vec::new(),
            free_cols: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn particular(&self) -> Option<&BitVector> {
        self.particular.as_ref()
    }

    pub fn null_basis(&self) -> &[BitVector] {
        &self.null_basis
    }

    pub fn dim(&self) -> usize {
        self.null_basis.len()
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let Some(p) = &self.particular else {
            return false;
        };
        let mut w = v.xor(p);
        for (u, &f) in self.null_basis.iter().zip(&self.free_cols) {
            if w.get(f) {
                w.xor_assign(u);
            }
        }
        w.is_zero()
    }

    /// Lists every solution when there are at most `cap` of them.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<BitVector>, TooMany> {
        assert!(cap >= 1, "cap must be positive");
        let Some(p) = &self.particular else {
            return Ok(Vec::new());
        };
        let dim = self.dim();
        if dim >= usize::BITS as usize - 1 || (1usize << dim) > cap {
            return Err(TooMany { dim, cap });
        }
        let mut out = Vec::with_capacity(1 << dim);
        for mask in 0usize..(1 << dim) {
            let mut v = p.clone();
            for (k, u) in self.null_basis.iter().enumerate() {
                if (mask >> k) & 1 == 1 {
                    v.xor_assign(u);
                }
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Erasure decoding of the affine code `v ↦ G·v ⊕ offset`: every `v` whose
/// encoding agrees with `received` on each unerased position.
pub fn solve_affine_erasure(
    g: &BitMatrix,
    offset: &BitVector,
    received: &TriString,
) -> Result<SolutionSpace, Gf2Error> {
    if g.rows() != received.len() {
        return Err(Gf2Error::DimensionMismatch {
            expected: g.rows(),
            found: received.len(),
        });
    }
    if offset.len() != received.len() {
        return Err(Gf2Error::DimensionMismatch {
            expected: received.len(),
            found: offset.len(),
        });
    }
    let mut elim = Eliminator::new(g.cols());
    let present = received.erasures().not();
    for r in present.iter_ones() {
        let rhs = received.values().get(r) ^ offset.get(r);
        if !elim.push(g.row_words(r), rhs) {
            break;
        }
    }
    Ok(elim.finish())
}
