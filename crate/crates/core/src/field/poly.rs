use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use super::clmul;
use super::FieldError;

/// Dense polynomial over GF(2) in the variable `z`, bit `i` holding the
/// coefficient of `z^i`. The word vector never carries trailing zero words,
/// so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self { words: vec![1] }
    }

    /// `z`
    pub fn z() -> Self {
        Self::monomial(1)
    }

    pub fn monomial(k: usize) -> Self {
        let mut words = Vec::new();
        clmul::set_bit(&mut words, k);
        Self { words }
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        clmul::trim(&mut words);
        Self { words }
    }

    /// Builds a polynomial from the exponents of its nonzero terms. Repeated
    /// exponents cancel in pairs.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut words = Vec::new();
        for e in exps {
            clmul::flip_bit(&mut words, e);
        }
        Self::from_words(words)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        clmul::top_bit(&self.words)
    }

    pub fn coeff(&self, i: usize) -> bool {
        clmul::get_bit(&self.words, i)
    }

    /// Exponents of the nonzero terms, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| 64 * wi + b)
        })
    }

    pub fn square(&self) -> Self {
        Self::from_words(clmul::square_words(&self.words, None))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn shl(&self, s: usize) -> Self {
        Self::from_words(clmul::shl(&self.words, s))
    }

    /// Euclidean division: returns `(q, r)` with `self = q*b + r`,
    /// `deg r < deg b`.
    pub fn divrem(&self, b: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly), FieldError> {
        let db = b.degree().ok_or(FieldError::ZeroDivisor)?;
        let mut r = self.words.clone();
        let mut q = Vec::new();
        while let Some(dr) = clmul::top_bit(&r) {
            if dr < db {
                break;
            }
            let shift = dr - db;
            clmul::flip_bit(&mut q, shift);
            let sb = clmul::shl(&b.words, shift);
            clmul::xor_into(&mut r, &sb);
            clmul::trim(&mut r);
        }
        Ok((Self::from_words(q), Self::from_words(r)))
    }

    pub fn rem(&self, b: &Gf2Poly) -> Result<Gf2Poly, FieldError> {
        Ok(self.divrem(b)?.1)
    }

    pub fn gcd(&self, other: &Gf2Poly) -> Gf2Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a
    }

    /// Exact division; errors when `b` does not divide `self`.
    pub fn div_exact(&self, b: &Gf2Poly) -> Result<Gf2Poly, FieldError> {
        let (q, r) = self.divrem(b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(FieldError::InexactDivision)
        }
    }
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;
    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        let mut w = self.words.clone();
        clmul::xor_into(&mut w, &rhs.words);
        Gf2Poly::from_words(w)
    }
}

impl Add for Gf2Poly {
    type Output = Gf2Poly;
    fn add(self, rhs: Gf2Poly) -> Gf2Poly {
        &self + &rhs
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;
    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        Gf2Poly::from_words(clmul::mul_words(&self.words, &rhs.words, None))
    }
}

impl Mul for Gf2Poly {
    type Output = Gf2Poly;
    fn mul(self, rhs: Gf2Poly) -> Gf2Poly {
        &self * &rhs
    }
}

impl fmt::Display for Gf2Poly {
    /// `z^2+z+1`; the zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut exps: Vec<usize> = self.exponents().collect();
        exps.reverse();
        let terms: Vec<String> = exps.into_iter().map(monomial_text).collect();
        f.write_str(&terms.join("+"))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

fn monomial_text(e: usize) -> String {
    match e {
        0 => "1".into(),
        1 => "z".into(),
        k => format!("z^{k}"),
    }
}

impl FromStr for Gf2Poly {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut words = Vec::new();
        for raw in s.split('+') {
            let term = raw.trim();
            let e = match term {
                "1" => 0,
                "z" => 1,
                t => t
                    .strip_prefix("z^")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| FieldError::Parse(format!("bad monomial '{term}' in '{s}'")))?,
            };
            if clmul::get_bit(&words, e) {
                return Err(FieldError::Parse(format!("duplicate monomial '{term}' in '{s}'")));
            }
            clmul::set_bit(&mut words, e);
        }
        Ok(Self::from_words(words))
    }
}
