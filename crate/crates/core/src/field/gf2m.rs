//! GF(2^m) for 2 <= m <= 32, used as the random evaluation field when
//! testing matrix identities.

use std::fmt;

use rand::Rng;

use super::{clmul, CharTwoField, FieldError, Gf2Poly};

pub const MIN_DEGREE: u32 = 2;
pub const MAX_DEGREE: u32 = 32;

/// Lexicographically least irreducible polynomial of each degree `m`
/// (index `m - 2`), bit `i` = coefficient of `x^i`.
pub const MODULI: [u64; 31] = [
    0x7,
    0xb,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11b,
    0x203,
    0x409,
    0x805,
    0x1009,
    0x201b,
    0x4021,
    0x8003,
    0x1002b,
    0x20009,
    0x40009,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x100001b,
    0x2000009,
    0x400001b,
    0x8000027,
    0x10000003,
    0x20000005,
    0x40000003,
    0x80000009,
    0x10000008d,
];

pub fn modulus(m: u32) -> Result<Gf2Poly, FieldError> {
    check_degree(m)?;
    Ok(Gf2Poly::from_words(vec![MODULI[(m - 2) as usize]]))
}

fn check_degree(m: u32) -> Result<(), FieldError> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&m) {
        Ok(())
    } else {
        Err(FieldError::UnsupportedExtension(m))
    }
}

/// Element of GF(2^m) in the polynomial basis of [`MODULI`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2mElem {
    rep: u64,
    m: u8,
}

impl Gf2mElem {
    pub fn new(rep: u64, m: u32) -> Result<Self, FieldError> {
        check_degree(m)?;
        if rep >> m != 0 {
            return Err(FieldError::Parse(format!("{rep:#x} has more than {m} bits")));
        }
        Ok(Self { rep, m: m as u8 })
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    pub fn degree(&self) -> u32 {
        self.m as u32
    }

    pub fn zero(m: u32) -> Result<Self, FieldError> {
        Self::new(0, m)
    }

    pub fn one(m: u32) -> Result<Self, FieldError> {
        Self::new(1, m)
    }

    /// Uniform draw from GF(2^m).
    pub fn sample<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<Self, FieldError> {
        check_degree(m)?;
        Self::new(rng.gen_range(0..1u64 << m), m)
    }

    /// Uniform draw from the nonzero elements.
    pub fn sample_invertible<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<Self, FieldError> {
        check_degree(m)?;
        Self::new(rng.gen_range(1..1u64 << m), m)
    }

    fn reduce(&self, lo: u64, hi: u64) -> u64 {
        let m = self.m as u32;
        let modulus = MODULI[(m - 2) as usize] as u128;
        let mut v = ((hi as u128) << 64) | lo as u128;
        while v >> m != 0 {
            let top = 127 - v.leading_zeros();
            v ^= modulus << (top - m);
        }
        v as u64
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = *self;
        let mut acc = Self { rep: 1, m: self.m };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl CharTwoField for Gf2mElem {
    fn zero_like(&self) -> Self {
        Self { rep: 0, m: self.m }
    }

    fn one_like(&self) -> Self {
        Self { rep: 1, m: self.m }
    }

    fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.m, rhs.m);
        Self { rep: self.rep ^ rhs.rep, m: self.m }
    }

    fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.m, rhs.m);
        let (lo, hi) = clmul::clmul64(self.rep, rhs.rep);
        Self { rep: self.reduce(lo, hi), m: self.m }
    }

    fn inv(&self) -> Result<Self, FieldError> {
        if self.rep == 0 {
            return Err(FieldError::NotInvertible);
        }
        // a^(2^m - 2)
        Ok(self.pow((1u128 << self.m) - 2))
    }

    fn is_zero(&self) -> bool {
        self.rep == 0
    }

    fn is_one(&self) -> bool {
        self.rep == 1
    }
}

impl fmt::Debug for Gf2mElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})[{:#x}]", self.m, self.rep)
    }
}
