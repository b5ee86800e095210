use super::bitvec::{parity_and, words_for, WORD_BITS};
use super::{BitVector, Gf2Error};

/// Dense row-major matrix over GF(2), each row packed into `u64` words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Gf2Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            m.row_words_mut(r).copy_from_slice(row.words());
        }
        Ok(m)
    }

    /// Builds the matrix whose `c`-th column is `columns[c]`.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Gf2Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for r in col.iter_ones() {
                m.set(r, c, true);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r},{c}) out of range"
        );
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r},{c}) out of range"
        );
        let w = &mut self.data[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_fn(self.rows, |r| self.get(r, c))
    }

    /// `G·v` over GF(2).
    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let vw = v.words();
        Ok(BitVector::from_fn(self.rows, |r| {
            parity_and(self.row_words(r), vw)
        }))
    }

    /// Row-space rank by elimination on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut elim = super::solve::Eliminator::new(self.cols);
        for r in 0..self.rows {
            elim.push(self.row_words(r), false);
        }
        elim.rank()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 32 && self.cols <= 64 {
            for r in 0..self.rows {
                writeln!(f, "  {}", self.row(r))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let v: BitVector = "1011".parse().unwrap();
        assert_eq!(BitMatrix::identity(4).mat_vec_mul(&v).unwrap(), v);
    }

    #[test]
    fn zero_matrix_kills_everything() {
        let v: BitVector = "1101101".parse().unwrap();
        let out = BitMatrix::zeros(5, 7).mat_vec_mul(&v).unwrap();
        assert_eq!(out, BitVector::zeros(5));
    }

    #[test]
    fn hand_evaluated_product() {
        // [[1,1],[0,1]] · (1,1) = (1⊕1, 1) = (0, 1)
        let g = BitMatrix::from_rows(2, &["11".parse().unwrap(), "01".parse().unwrap()]).unwrap();
        let out = g.mat_vec_mul(&"11".parse().unwrap()).unwrap();
        assert_eq!(out.to_string(), "01");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = BitMatrix::zeros(3, 4);
        assert_eq!(
            g.mat_vec_mul(&BitVector::zeros(5)),
            Err(Gf2Error::DimensionMismatch {
                expected: 4,
                found: 5
            })
        );
    }

    #[test]
    fn columns_and_transpose_agree() {
        let cols: Vec<BitVector> = (0..70)
            .map(|c| BitVector::from_fn(9, |r| (r * 31 + c * 7) % 5 == 0))
            .collect();
        let m = BitMatrix::from_columns(9, &cols).unwrap();
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(&m.column(c), col);
            assert_eq!(&m.transpose().row(c), col);
        }
    }
}
