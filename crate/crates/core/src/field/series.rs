//! Truncated Laurent series in `1/z` over GF(2) with absolute precision.
//!
//! A value `z^-v * (1 + c1 z^-1 + c2 z^-2 + ...) + O(z^-p)` stores `v`, the
//! coefficient bits (bit `i` is the coefficient of `z^-(v+i)`) and `p`.
//! Coefficients of `z^-n` are known for every `n < p`. A series with no
//! known nonzero coefficient is the zero-to-precision sentinel.
//!
//! Precision rules (val of a zero series is read as its precision):
//!
//! | op       | result precision                       |
//! |----------|----------------------------------------|
//! | `a + b`  | `min(p_a, p_b)`                        |
//! | `a * b`  | `min(p_a + val b, p_b + val a)`        |
//! | `1 / a`  | `p_a - 2 val a`                        |
//! | `a^2`    | `2 p_a` (cross terms vanish)           |

use std::cmp::Ordering;
use std::fmt;

use super::{clmul, CharTwoField, FieldError, Gf2Poly};

/// Precision of exactly known values (polynomials in `z`). Arithmetic
/// saturates at this bound.
pub const EXACT: i64 = i64::MAX / 4;

/// Valuation of a series: finite, or +infinity as far as the precision
/// allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    ZeroTo(i64),
}

impl Valuation {
    /// Lower bound usable in comparisons: the valuation itself, or the
    /// precision up to which the series is known to vanish.
    pub fn at_least(&self) -> i64 {
        match *self {
            Valuation::Finite(v) | Valuation::ZeroTo(v) => v,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Valuation::ZeroTo(_))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::ZeroTo(p) if p >= EXACT => write!(f, "inf"),
            Valuation::ZeroTo(p) => write!(f, "inf(>={p})"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    /// Exponent of the leading term as a power of `1/z`; equals `prec` for
    /// the zero sentinel.
    val: i64,
    coeffs: Vec<u64>,
    prec: i64,
}

fn sat(x: i128) -> i64 {
    x.clamp(-(EXACT as i128), EXACT as i128) as i64
}

impl LaurentSeries {
    fn normalize(val: i64, mut bits: Vec<u64>, prec: i64) -> Self {
        let avail = prec as i128 - val as i128;
        if avail <= 0 {
            return Self::zero(prec);
        }
        if avail < (bits.len() as i128) * 64 {
            clmul::truncate_bits(&mut bits, avail as usize);
        }
        match clmul::low_bit(&bits) {
            None => Self::zero(prec),
            Some(l) => {
                let mut coeffs = if l == 0 { bits } else { clmul::shr(&bits, l) };
                clmul::trim(&mut coeffs);
                Self { val: val + l as i64, coeffs, prec }
            }
        }
    }

    /// `O(z^-prec)`
    pub fn zero(prec: i64) -> Self {
        Self { val: prec, coeffs: Vec::new(), prec }
    }

    pub fn one() -> Self {
        Self { val: 0, coeffs: vec![1], prec: EXACT }
    }

    /// Exact `z^k`.
    pub fn monomial(k: i64) -> Self {
        Self { val: -k, coeffs: vec![1], prec: EXACT }
    }

    /// Builds `sum_{n in terms} z^-n + O(z^-prec)`; exponents at or beyond
    /// `prec` are dropped, repeated ones cancel.
    pub fn from_terms<I: IntoIterator<Item = i64>>(terms: I, prec: i64) -> Self {
        let terms: Vec<i64> = terms.into_iter().filter(|&n| n < prec).collect();
        let Some(&base) = terms.iter().min() else {
            return Self::zero(prec);
        };
        let mut bits = Vec::new();
        for n in terms {
            clmul::flip_bit(&mut bits, (n - base) as usize);
        }
        Self::normalize(base, bits, prec)
    }

    /// The exact series of a polynomial.
    pub fn from_poly(p: &Gf2Poly) -> Self {
        match p.degree() {
            None => Self::zero(EXACT),
            Some(_) => Self::from_terms(p.exponents().map(|e| -(e as i64)), EXACT),
        }
    }

    /// Expansion of `num / den` in powers of `1/z`, known below `prec`.
    pub fn from_rational(num: &Gf2Poly, den: &Gf2Poly, prec: i64) -> Result<Self, FieldError> {
        let dd = den.degree().ok_or(FieldError::ZeroDivisor)? as i64;
        let Some(dn) = num.degree() else {
            return Ok(Self::zero(prec));
        };
        let val = dd - dn as i64;
        if prec <= val {
            return Err(FieldError::PrecisionTooLow { requested: prec, valuation: val });
        }
        let n = (prec - val) as usize;
        let rev_num = reverse_poly(num, dn);
        let rev_den = reverse_poly(den, dd as usize);
        let inv = unit_inverse(&rev_den, n);
        let bits = clmul::mul_words(&rev_num, &inv, Some(n));
        Ok(Self::normalize(val, bits, prec))
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    pub fn valuation(&self) -> Valuation {
        if self.coeffs.is_empty() {
            Valuation::ZeroTo(self.prec)
        } else {
            Valuation::Finite(self.val)
        }
    }

    /// Leading exponent (as a power of `1/z`), or the precision for the zero
    /// sentinel.
    pub fn val_or_prec(&self) -> i64 {
        self.val
    }

    /// Coefficient of `z^-n`; `None` when `n` is beyond the precision.
    pub fn coeff(&self, n: i64) -> Option<bool> {
        if n >= self.prec {
            return None;
        }
        if self.coeffs.is_empty() || n < self.val {
            return Some(false);
        }
        Some(clmul::get_bit(&self.coeffs, (n - self.val) as usize))
    }

    /// Exponents `n` (as powers of `1/z`) with a nonzero coefficient,
    /// ascending.
    pub fn terms(&self) -> impl Iterator<Item = i64> + '_ {
        let v = self.val;
        self.coeffs.iter().enumerate().flat_map(move |(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| v + (64 * wi + b) as i64)
        })
    }

    /// Drops everything at or beyond `z^-prec`. Never raises precision.
    pub fn with_prec(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        if self.coeffs.is_empty() {
            return Self::zero(prec);
        }
        Self::normalize(self.val, self.coeffs.clone(), prec)
    }

    /// Multiplication by the exact monomial `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        let prec = if self.is_exact() { EXACT } else { sat(self.prec as i128 - k as i128) };
        if self.coeffs.is_empty() {
            return Self::zero(prec);
        }
        Self { val: self.val - k, coeffs: self.coeffs.clone(), prec }
    }

    /// Inverse, truncated so the result is known below `cap` (useful when
    /// the input is exact and the expansion is infinite).
    pub fn inv_capped(&self, cap: i64) -> Result<Self, FieldError> {
        if self.coeffs.is_empty() {
            return Err(FieldError::NotInvertible);
        }
        let natural = sat(self.prec as i128 - 2 * self.val as i128);
        let prec = natural.min(cap);
        if self.coeffs == [1] && natural >= EXACT {
            return Ok(Self::monomial(self.val).with_prec(prec));
        }
        if prec >= EXACT {
            return Err(FieldError::InfiniteExpansion);
        }
        // 1/a = z^v * u^-1 with u a unit in GF(2)[[1/z]]
        let n = prec as i128 + self.val as i128;
        if n <= 0 {
            return Ok(Self::zero(prec));
        }
        let inv = unit_inverse(&self.coeffs, n as usize);
        Ok(Self::normalize(-self.val, inv, prec))
    }

    /// Sum of `self` and `other` with the precision fixed to the smaller of
    /// the two; exposed for callers that track the residual explicitly.
    pub fn residual(&self, other: &Self) -> Self {
        CharTwoField::add(self, other)
    }
}

/// Coefficient vector of `z^d p(1/z)` (bit `i` = coefficient of `z^(d-i)`).
fn reverse_poly(p: &Gf2Poly, d: usize) -> Vec<u64> {
    let mut bits = Vec::new();
    for e in p.exponents() {
        clmul::set_bit(&mut bits, d - e);
    }
    bits
}

/// Inverse of a power series with constant term 1, modulo `w^n`, by the
/// characteristic-2 Newton step `g <- u g^2`.
fn unit_inverse(u: &[u64], n: usize) -> Vec<u64> {
    debug_assert!(clmul::get_bit(u, 0));
    let mut g = vec![1u64];
    let mut k = 1usize;
    while k < n {
        k = (2 * k).min(n);
        let mut uk = u.to_vec();
        clmul::truncate_bits(&mut uk, k);
        let g2 = clmul::square_words(&g, Some(k));
        g = clmul::mul_words(&uk, &g2, Some(k));
    }
    clmul::truncate_bits(&mut g, n);
    g
}

impl CharTwoField for LaurentSeries {
    fn zero_like(&self) -> Self {
        Self::zero(EXACT)
    }

    fn one_like(&self) -> Self {
        Self::one()
    }

    fn add(&self, rhs: &Self) -> Self {
        let prec = self.prec.min(rhs.prec);
        match (self.coeffs.is_empty(), rhs.coeffs.is_empty()) {
            (true, true) => return Self::zero(prec),
            (true, false) => return rhs.with_prec(prec),
            (false, true) => return self.with_prec(prec),
            _ => {}
        }
        let base = self.val.min(rhs.val);
        let mut bits = clmul::shl(&self.coeffs, (self.val - base) as usize);
        let other = clmul::shl(&rhs.coeffs, (rhs.val - base) as usize);
        clmul::xor_into(&mut bits, &other);
        Self::normalize(base, bits, prec)
    }

    fn mul(&self, rhs: &Self) -> Self {
        let prec = sat((self.prec as i128 + rhs.val as i128).min(rhs.prec as i128 + self.val as i128));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero(prec);
        }
        let val = self.val + rhs.val;
        if prec <= val {
            return Self::zero(prec);
        }
        let keep = (prec as i128 - val as i128).min(usize::MAX as i128 / 2) as usize;
        let bits = clmul::mul_words(&self.coeffs, &rhs.coeffs, Some(keep));
        Self::normalize(val, bits, prec)
    }

    fn inv(&self) -> Result<Self, FieldError> {
        self.inv_capped(EXACT)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn is_one(&self) -> bool {
        self.val == 0 && self.coeffs == [1]
    }

    fn square(&self) -> Self {
        let prec = sat(2 * self.prec as i128);
        if self.coeffs.is_empty() {
            return Self::zero(prec);
        }
        let val = 2 * self.val;
        if prec <= val {
            return Self::zero(prec);
        }
        let keep = (prec as i128 - val as i128).min(usize::MAX as i128 / 2) as usize;
        Self::normalize(val, clmul::square_words(&self.coeffs, Some(keep)), prec)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.at_least().cmp(&other.at_least()))
    }
}

fn exp_text(e: i64) -> String {
    match e {
        0 => "1".into(),
        1 => "z".into(),
        k => format!("z^{k}"),
    }
}

impl fmt::Display for LaurentSeries {
    /// `z + z^-1 + z^-3 + O(z^-8)`, decreasing exponents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms().map(|n| exp_text(-n)).collect();
        if !self.is_exact() {
            parts.push(format!("O({})", exp_text(-self.prec)));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries({self})")
    }
}
