//! 2x2 matrices over characteristic-2 fields, letter matrices, convergents
//! and the two matrix towers.
//!
//! The letter matrix of `x` is `A(x) = ((1, 1/x), (1/x, 0))` and a word
//! `u_0 ... u_n` maps to `A(u_n) ... A(u_0)` (newest factor on the left).
//! For that product `M`, `M_01 / M_00 = 1 / [u_0, ..., u_n]`; the continued
//! fraction itself is `M_00 / M_01`. Exact convergents avoid the `1/x`
//! entries and use the continuant recurrence over GF(2)[z].

mod gtower;
mod ptower;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::field::{CharTwoField, FieldError, Gf2Poly, Gf2Ratio, LaurentSeries};
use crate::seqgen::{SeqError, Word};

pub use gtower::{
    check_period_word, g_quantities, g_tower_limits, g_tower_word, GLimits, GQuantities, GTowerState,
};
pub use ptower::{p_lambda, p_tower_limits, PLimits, PTowerState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfError {
    #[error("cfmat: zero partial quotient")]
    ZeroPartialQuotient,
    #[error("cfmat: letter '{0}' has no specialization")]
    UnmappedLetter(char),
    #[error("cfmat: constant specialization for letter '{0}'")]
    ConstantSpecialization(char),
    #[error("cfmat: cannot parse specialization '{0}'")]
    Parse(String),
    #[error("cfmat: empty word")]
    EmptyWord,
    #[error("cfmat: degenerate specialization ({0} not invertible)")]
    Degenerate(&'static str),
    #[error("cfmat: hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("cfmat: initial words must have equal length (|u0| = {0}, |v0| = {1})")]
    UnequalLengths(usize, usize),
    #[error("cfmat: no convergence within {steps} steps (reached precision {achieved})")]
    Budget { steps: usize, achieved: i64 },
    #[error("cfmat: word of length {len} too short for precision {prec}")]
    WordTooShort { len: usize, prec: i64 },
    #[error("cfmat: {0}")]
    Field(#[from] FieldError),
    #[error("cfmat: {0}")]
    Seq(#[from] SeqError),
}

/// `((e00, e01), (e10, e11))`.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2<F> {
    pub e00: F,
    pub e01: F,
    pub e10: F,
    pub e11: F,
}

impl<F: CharTwoField> Mat2<F> {
    pub fn new(e00: F, e01: F, e10: F, e11: F) -> Self {
        Self { e00, e01, e10, e11 }
    }

    pub fn scalar(s: F) -> Self {
        let z = s.zero_like();
        Self { e00: s.clone(), e01: z.clone(), e10: z, e11: s }
    }

    pub fn identity(like: &F) -> Self {
        Self::scalar(like.one_like())
    }

    pub fn zero(like: &F) -> Self {
        Self::scalar(like.zero_like())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            e00: self.e00.add(&rhs.e00),
            e01: self.e01.add(&rhs.e01),
            e10: self.e10.add(&rhs.e10),
            e11: self.e11.add(&rhs.e11),
        }
    }

    /// `self + s * I`
    pub fn add_scalar(&self, s: &F) -> Self {
        Self {
            e00: self.e00.add(s),
            e01: self.e01.clone(),
            e10: self.e10.clone(),
            e11: self.e11.add(s),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            e00: self.e00.mul(&rhs.e00).add(&self.e01.mul(&rhs.e10)),
            e01: self.e00.mul(&rhs.e01).add(&self.e01.mul(&rhs.e11)),
            e10: self.e10.mul(&rhs.e00).add(&self.e11.mul(&rhs.e10)),
            e11: self.e10.mul(&rhs.e01).add(&self.e11.mul(&rhs.e11)),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        Self {
            e00: self.e00.mul(s),
            e01: self.e01.mul(s),
            e10: self.e10.mul(s),
            e11: self.e11.mul(s),
        }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// `self^(2^k)`
    pub fn frobenius(&self, k: u32) -> Self {
        let mut m = self.clone();
        for _ in 0..k {
            m = m.square();
        }
        m
    }

    pub fn det(&self) -> F {
        self.e00.mul(&self.e11).add(&self.e01.mul(&self.e10))
    }

    pub fn trace(&self) -> F {
        self.e00.add(&self.e11)
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let di = self.det().inv()?;
        Ok(Self::new(self.e11.clone(), self.e01.clone(), self.e10.clone(), self.e00.clone()).scale(&di))
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    pub fn is_scalar(&self) -> bool {
        self.e01.is_zero() && self.e10.is_zero() && self.e00.add(&self.e11).is_zero()
    }

    /// The scalar a scalar matrix stands for.
    pub fn as_scalar(&self) -> Option<F> {
        self.is_scalar().then(|| self.e00.clone())
    }

    /// Equality in the sense of the coefficient field (for series: agreement
    /// below the common precision).
    pub fn agrees(&self, rhs: &Self) -> bool {
        self.add(rhs).is_zero()
    }

    pub fn entries(&self) -> [&F; 4] {
        [&self.e00, &self.e01, &self.e10, &self.e11]
    }

    pub fn map<G, E>(&self, f: impl Fn(&F) -> Result<G, E>) -> Result<Mat2<G>, E> {
        Ok(Mat2 { e00: f(&self.e00)?, e01: f(&self.e01)?, e10: f(&self.e10)?, e11: f(&self.e11)? })
    }
}

impl<F: fmt::Debug> fmt::Debug for Mat2<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{:?}, {:?}], [{:?}, {:?}]]", self.e00, self.e01, self.e10, self.e11)
    }
}

impl Mat2<LaurentSeries> {
    /// Smallest valuation over the four entries.
    pub fn min_val(&self) -> i64 {
        self.entries().iter().map(|e| e.val_or_prec()).min().expect("four entries")
    }

    pub fn min_prec(&self) -> i64 {
        self.entries().iter().map(|e| e.prec()).min().expect("four entries")
    }

    pub fn with_prec(&self, prec: i64) -> Self {
        Self::new(
            self.e00.with_prec(prec),
            self.e01.with_prec(prec),
            self.e10.with_prec(prec),
            self.e11.with_prec(prec),
        )
    }
}

/// `((1, 1/x), (1/x, 0))`
pub fn letter_matrix<F: CharTwoField>(x: &F) -> Result<Mat2<F>, CfError> {
    if x.is_zero() {
        return Err(CfError::ZeroPartialQuotient);
    }
    let xi = x.inv()?;
    Ok(Mat2::new(x.one_like(), xi.clone(), xi, x.zero_like()))
}

/// `A(x) + I = ((0, 1/x), (1/x, 1))`
pub fn b_matrix<F: CharTwoField>(x: &F) -> Result<Mat2<F>, CfError> {
    Ok(letter_matrix(x)?.add(&Mat2::identity(x)))
}

/// Product of letter matrices of `letters`, newest on the left; identity
/// for an empty list.
pub fn word_matrix<F: CharTwoField>(letters: &[F], like: &F) -> Result<Mat2<F>, CfError> {
    let mut m = Mat2::identity(like);
    for x in letters {
        m = letter_matrix(x)?.mul(&m);
    }
    Ok(m)
}

/// Letters assigned to non-constant polynomials in `z`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecializationMap {
    map: BTreeMap<u8, Gf2Poly>,
}

impl SpecializationMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, letter: u8, p: Gf2Poly) -> Result<(), CfError> {
        if p.degree().unwrap_or(0) == 0 {
            return Err(CfError::ConstantSpecialization(letter as char));
        }
        self.map.insert(letter, p);
        Ok(())
    }

    /// `0 -> z`, `1 -> z + 1`.
    pub fn default_binary() -> Self {
        let mut sp = Self::new();
        sp.insert(b'0', Gf2Poly::z()).expect("degree 1");
        sp.insert(b'1', "z+1".parse().expect("literal")).expect("degree 1");
        sp
    }

    pub fn get(&self, letter: u8) -> Result<&Gf2Poly, CfError> {
        self.map.get(&letter).ok_or(CfError::UnmappedLetter(letter as char))
    }

    pub fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        self.map.keys().copied()
    }

    pub fn covers(&self, alphabet: &BTreeSet<u8>) -> Result<(), CfError> {
        match alphabet.iter().find(|c| !self.map.contains_key(c)) {
            Some(&c) => Err(CfError::UnmappedLetter(c as char)),
            None => Ok(()),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.map.values().filter_map(Gf2Poly::degree).max().unwrap_or(1)
    }

    pub fn polys(&self, w: &Word) -> Result<Vec<Gf2Poly>, CfError> {
        w.letters().iter().map(|&c| self.get(c).cloned()).collect()
    }

    /// Letters of `w` as series, each known below `prec` after inversion.
    pub fn series(&self, w: &Word) -> Result<Vec<LaurentSeries>, CfError> {
        w.letters().iter().map(|&c| Ok(LaurentSeries::from_poly(self.get(c)?))).collect()
    }

    /// `A(u_{n}) ... A(u_0)` with `1/u_i` expanded below `prec`.
    pub fn word_matrix_series(&self, w: &Word, prec: i64) -> Result<Mat2<LaurentSeries>, CfError> {
        let mut m = Mat2::identity(&LaurentSeries::one());
        for &c in w.letters() {
            m = letter_matrix_series(self.get(c)?, prec)?.mul(&m);
        }
        Ok(m)
    }
}

/// Letter matrix of a polynomial with `1/x` expanded below `prec`.
pub fn letter_matrix_series(x: &Gf2Poly, prec: i64) -> Result<Mat2<LaurentSeries>, CfError> {
    if x.is_zero() {
        return Err(CfError::ZeroPartialQuotient);
    }
    let xi = LaurentSeries::from_poly(x).inv_capped(prec)?;
    let one = LaurentSeries::one();
    Ok(Mat2::new(one, xi.clone(), xi, LaurentSeries::zero(crate::field::EXACT)))
}

impl fmt::Display for SpecializationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(&c, p)| format!("{}={}", c as char, p)).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for SpecializationMap {
    type Err = CfError;
    fn from_str(s: &str) -> Result<Self, CfError> {
        let mut sp = Self::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| CfError::Parse(part.to_string()))?;
            let k = k.trim().as_bytes();
            if k.len() != 1 || !k[0].is_ascii_alphanumeric() {
                return Err(CfError::Parse(part.to_string()));
            }
            let p: Gf2Poly = v.trim().parse().map_err(|_| CfError::Parse(part.to_string()))?;
            sp.insert(k[0], p)?;
        }
        Ok(sp)
    }
}

/// Numerator and denominator of `[u_0, ..., u_n]` by the continuant
/// recurrence `p_n = u_n p_{n-1} + p_{n-2}`.
pub fn continuants(us: &[Gf2Poly]) -> Result<(Gf2Poly, Gf2Poly), CfError> {
    if us.is_empty() {
        return Err(CfError::EmptyWord);
    }
    let (mut p, mut p_prev) = (us[0].clone(), Gf2Poly::one());
    let (mut q, mut q_prev) = (Gf2Poly::one(), Gf2Poly::zero());
    for u in &us[1..] {
        let np = &(u * &p) + &p_prev;
        let nq = &(u * &q) + &q_prev;
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
    }
    Ok((p, q))
}

/// `[u_0, ..., u_n]` exactly.
pub fn convergent_exact(w: &Word, sp: &SpecializationMap) -> Result<Gf2Ratio, CfError> {
    let (p, q) = continuants(&sp.polys(w)?)?;
    assert!(!q.is_zero(), "non-constant partial quotients give a nonzero denominator");
    Ok(Gf2Ratio::new(p, q)?)
}

/// `[u_0, ..., u_n]` expanded below `prec`.
pub fn convergent_series(w: &Word, sp: &SpecializationMap, prec: i64) -> Result<LaurentSeries, CfError> {
    let r = convergent_exact(w, sp)?;
    Ok(LaurentSeries::from_rational(r.num(), r.den(), prec)?)
}

/// The infinite continued fraction whose partial quotients start with `w`,
/// known below `prec`.
///
/// Two consecutive convergents `p_n/q_n`, `p_{n+1}/q_{n+1}` of any extension
/// differ from the limit by a series of valuation at least
/// `deg q_n + deg q_{n+1}`, so the prefix is consumed until that sum reaches
/// `prec`.
pub fn cf_series(w: &Word, sp: &SpecializationMap, prec: i64) -> Result<LaurentSeries, CfError> {
    let us = sp.polys(w)?;
    if us.is_empty() {
        return Err(CfError::EmptyWord);
    }
    let (mut p, mut p_prev) = (us[0].clone(), Gf2Poly::one());
    let (mut q, mut q_prev) = (Gf2Poly::one(), Gf2Poly::zero());
    for u in &us[1..] {
        let np = &(u * &p) + &p_prev;
        let nq = &(u * &q) + &q_prev;
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
        let reach = (q.degree().unwrap_or(0) + q_prev.degree().unwrap_or(0)) as i64;
        if reach >= prec {
            return Ok(LaurentSeries::from_rational(&p_prev, &q_prev, prec)?);
        }
    }
    Err(CfError::WordTooShort { len: w.len(), prec })
}

/// A word length that always suffices for [`cf_series`] at `prec`
/// (every partial quotient has degree at least 1).
pub fn cf_prefix_len(prec: i64) -> usize {
    prec.max(0) as usize + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::EXACT;

    fn sp(s: &str) -> SpecializationMap {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn letter_matrix_determinant() {
        let z = LaurentSeries::monomial(1);
        let a = letter_matrix(&Gf2Ratio::from_poly(Gf2Poly::z())).unwrap();
        assert_eq!(a.det(), Gf2Ratio::from_poly(Gf2Poly::z().square()).inv().unwrap());
        assert!(letter_matrix(&z.zero_like()).is_err());
    }

    #[test]
    fn newest_factor_on_the_left() {
        let a = Gf2Ratio::from_poly(Gf2Poly::z());
        let b = Gf2Ratio::from_poly("z+1".parse().unwrap());
        let m = word_matrix(&[a.clone(), b.clone()], &a).unwrap();
        let expect = letter_matrix(&b).unwrap().mul(&letter_matrix(&a).unwrap());
        assert_eq!(m, expect);
        assert_eq!(word_matrix(&[a.clone()], &a).unwrap(), letter_matrix(&a).unwrap());
    }

    #[test]
    fn reciprocal_ratio_of_the_matrix_product() {
        let map = sp("a=z,b=z+1,c=z^2");
        for word in ["a", "ab", "abc", "cabba"] {
            let word = w(word);
            let letters: Vec<Gf2Ratio> =
                map.polys(&word).unwrap().into_iter().map(Gf2Ratio::from_poly).collect();
            let m = word_matrix(&letters, &letters[0]).unwrap();
            let cf = convergent_exact(&word, &map).unwrap();
            assert_eq!(m.e00.div(&m.e01).unwrap(), cf, "{word}");
        }
    }

    #[test]
    fn small_convergents() {
        let map = sp("z=z");
        assert_eq!(convergent_exact(&w("z"), &map).unwrap().to_string(), "z");
        assert_eq!(convergent_exact(&w("zz"), &map).unwrap().to_string(), "(z^2+1)/(z)");
        let s = convergent_series(&w("zzz"), &map, 8).unwrap();
        assert_eq!(s, LaurentSeries::from_terms([-1, 1, 3, 5, 7], 8));
        assert!(convergent_exact(&w(""), &map).is_err());
        assert_eq!(convergent_exact(&w("q"), &map).unwrap_err(), CfError::UnmappedLetter('q'));
    }

    #[test]
    fn infinite_cf_of_a_constant_sequence() {
        // x = z + 1/x, so x^2 + z x + 1 = 0.
        let map = sp("z=z");
        let x = cf_series(&w("z").repeat(80), &map, 64).unwrap();
        let z = LaurentSeries::monomial(1);
        let lhs = x.square().add(&z.mul(&x)).add(&LaurentSeries::one());
        assert!(lhs.valuation().at_least() >= 64 - 2);
        assert!(cf_series(&w("zz"), &map, 64).is_err());
        assert_eq!(LaurentSeries::one().prec(), EXACT);
    }

    #[test]
    fn specialization_parsing() {
        let map = sp("a=z, b=z+1");
        assert_eq!(map.to_string(), "a=z,b=z+1");
        assert_eq!("a=1".parse::<SpecializationMap>().unwrap_err(), CfError::ConstantSpecialization('a'));
        assert!("a".parse::<SpecializationMap>().is_err());
        assert!("ab=z".parse::<SpecializationMap>().is_err());
        let alphabet: BTreeSet<u8> = [b'a', b'c'].into();
        assert_eq!(map.covers(&alphabet).unwrap_err(), CfError::UnmappedLetter('c'));
    }

    #[test]
    fn scalar_matrices() {
        let two = Gf2Ratio::from_poly(Gf2Poly::z());
        let m = Mat2::scalar(two.clone());
        assert!(m.is_scalar());
        assert_eq!(m.as_scalar(), Some(two.clone()));
        assert!(m.mul(&m.inv().unwrap()).agrees(&Mat2::identity(&two)));
    }
}
