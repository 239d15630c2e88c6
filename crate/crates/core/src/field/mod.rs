//! Characteristic-2 coefficient arithmetic: GF(2)[z], its fraction field,
//! GF(2^m), and truncated Laurent series in 1/z.

pub mod clmul;
mod gf2m;
mod poly;
mod ratio;
mod series;

use std::fmt;

pub use gf2m::{modulus as gf2m_modulus, Gf2mElem, MAX_DEGREE as GF2M_MAX_DEGREE, MODULI as GF2M_MODULI};
pub use poly::Gf2Poly;
pub use ratio::Gf2Ratio;
pub use series::{LaurentSeries, Valuation, EXACT};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("not invertible at this precision")]
    NotInvertible,
    #[error("division is not exact")]
    InexactDivision,
    #[error("exact inverse of a non-monomial series needs a finite precision")]
    InfiniteExpansion,
    #[error("precision {requested} does not exceed the valuation {valuation}")]
    PrecisionTooLow { requested: i64, valuation: i64 },
    #[error("GF(2^{0}) is not supported (2 <= m <= 32)")]
    UnsupportedExtension(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A field of characteristic 2. Subtraction is addition.
///
/// Elements carry whatever context they need (extension degree, precision),
/// so constants are produced from an existing element with
/// [`zero_like`](Self::zero_like) / [`one_like`](Self::one_like).
pub trait CharTwoField: Clone + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Result<Self, FieldError>;
    fn is_zero(&self) -> bool;

    fn is_one(&self) -> bool {
        self.add(&self.one_like()).is_zero()
    }

    fn square(&self) -> Self {
        self.mul(self)
    }

    fn div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&rhs.inv()?))
    }

    fn pow(&self, mut e: u128) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Integer power; negative exponents invert first.
    fn powi(&self, e: i128) -> Result<Self, FieldError> {
        if e >= 0 {
            Ok(self.pow(e as u128))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// `x^(2^k)` by repeated squaring.
    fn frobenius(&self, k: u32) -> Self {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.square();
        }
        x
    }
}
