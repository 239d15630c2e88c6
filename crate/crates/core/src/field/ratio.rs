use std::fmt;

use super::{CharTwoField, FieldError, Gf2Poly};

/// Exact element of GF(2)(z), kept in lowest terms. The denominator is
/// never zero; zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Ratio {
    num: Gf2Poly,
    den: Gf2Poly,
}

impl Gf2Ratio {
    pub fn new(num: Gf2Poly, den: Gf2Poly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::ZeroDivisor);
        }
        if num.is_zero() {
            return Ok(Self { num, den: Gf2Poly::one() });
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num.div_exact(&g)?,
            den: den.div_exact(&g)?,
        })
    }

    pub fn from_poly(p: Gf2Poly) -> Self {
        Self { num: p, den: Gf2Poly::one() }
    }

    pub fn num(&self) -> &Gf2Poly {
        &self.num
    }

    pub fn den(&self) -> &Gf2Poly {
        &self.den
    }
}

impl CharTwoField for Gf2Ratio {
    fn zero_like(&self) -> Self {
        Self::from_poly(Gf2Poly::zero())
    }

    fn one_like(&self) -> Self {
        Self::from_poly(Gf2Poly::one())
    }

    fn add(&self, rhs: &Self) -> Self {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Self::new(num, &self.den * &rhs.den).expect("nonzero denominators")
    }

    fn mul(&self, rhs: &Self) -> Self {
        Self::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominators")
    }

    fn inv(&self) -> Result<Self, FieldError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl fmt::Display for Gf2Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for Gf2Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Ratio({self})")
    }
}
