/// Primitive polynomials for GF(2^q), indexed by q, including the x^q term.
const POLYS: [u32; 25] = [
    0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B, 0x20009, 0x40081, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021, 0x1000087,
];

const TABLE_MAX_BITS: u32 = 16;

/// Arithmetic in GF(2^q), elements stored as the low q bits of a `u32`
/// (polynomial basis, bit i = coefficient of x^i).
#[derive(Clone, Debug)]
pub struct Gf2m {
    bits: u32,
    poly: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Gf2m {
    pub fn new(bits: u32) -> Self {
        assert!((2..=24).contains(&bits), "unsupported field degree {bits}");
        let poly = POLYS[bits as usize];
        let mut f = Self {
            bits,
            poly,
            exp: Vec::new(),
            log: Vec::new(),
        };
        if bits <= TABLE_MAX_BITS {
            let order = (1usize << bits) - 1;
            let mut exp = vec![0u32; 2 * order];
            let mut log = vec![0u32; order + 1];
            let mut v = 1u32;
            for (i, slot) in exp.iter_mut().enumerate().take(order) {
                *slot = v;
                log[v as usize] = i as u32;
                v = f.mul_x(v);
            }
            for i in order..2 * order {
                exp[i] = exp[i - order];
            }
            f.exp = exp;
            f.log = log;
        }
        f
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn size(&self) -> u64 {
        1u64 << self.bits
    }

    #[inline]
    pub fn mul_x(&self, a: u32) -> u32 {
        let s = a << 1;
        if s >> self.bits & 1 == 1 {
            s ^ self.poly
        } else {
            s
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.log.is_empty() {
            return self.exp[(self.log[a as usize] + self.log[b as usize]) as usize];
        }
        let mut acc = 0u32;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a = self.mul_x(a);
        }
        acc
    }

    /// Horner evaluation of `Σ coeffs[i]·z^i`.
    pub fn eval(&self, coeffs: &[u32], z: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.mul(acc, z) ^ c)
    }
}
