//! The tower of a `G(u0, v0, ups)` sequence: `m_1 = w_0 m_0`,
//! `w_1 = m_0 w_0`, and for a binary word `s`
//! `m_{1s0} = m_{1s}^2`, `w_{1s0} = w_{1s}^2`,
//! `m_{1s1} = w_{1s} m_{1s}`, `w_{1s1} = m_{1s} w_{1s}`.
//!
//! Scalar matrices are identified with scalars. With `d = det m_1`,
//! `r = tr m_1` and `co = m_1 + w_1 + r`, `co^2` is scalar, so every power of
//! `co` is `(co^2)^a` or `(co^2)^a co`.

use crate::field::{CharTwoField, LaurentSeries};
use crate::seqgen::{g_normalize, GSpec, Normalized, WordStats};

use super::{CfError, Mat2, SpecializationMap};

/// `(m_{1s}, w_{1s})` for the bits of `s`.
pub fn g_tower_word<F: CharTwoField>(m0: &Mat2<F>, w0: &Mat2<F>, s: &[u8]) -> (Mat2<F>, Mat2<F>) {
    let mut m = w0.mul(m0);
    let mut w = m0.mul(w0);
    for &bit in s {
        if bit == 0 {
            m = m.square();
            w = w.square();
        } else {
            let nm = w.mul(&m);
            w = m.mul(&w);
            m = nm;
        }
    }
    (m, w)
}

/// `d`, `r`, `co` and the correction terms `c_j(s)` of one tower generation.
#[derive(Debug, Clone)]
pub struct GQuantities<F> {
    pub s: Vec<u8>,
    pub m1: Mat2<F>,
    pub w1: Mat2<F>,
    pub d: F,
    pub r: F,
    pub co: Mat2<F>,
    /// The scalar `co^2`.
    pub co2: F,
    /// `e(s(j))` for `j = 0..=k`.
    pub e: Vec<u128>,
    /// `c_1 .. c_k`.
    pub c: Vec<Mat2<F>>,
    /// `r^(2^k - 1 - e(s)) co^(e(s))`.
    pub l: Mat2<F>,
    r_inv: F,
    co2_inv: F,
}

impl<F: CharTwoField> GQuantities<F> {
    pub fn k(&self) -> usize {
        self.s.len()
    }

    /// `co^e` for any integer `e`.
    pub fn co_pow(&self, e: i128) -> Mat2<F> {
        let half = e.div_euclid(2);
        let base = if half >= 0 { self.co2.pow(half as u128) } else { self.co2_inv.pow(half.unsigned_abs()) };
        if e.rem_euclid(2) == 1 {
            self.co.scale(&base)
        } else {
            Mat2::scalar(base)
        }
    }

    /// `r^e` for any integer `e`.
    pub fn r_pow(&self, e: i128) -> F {
        if e >= 0 {
            self.r.pow(e as u128)
        } else {
            self.r_inv.pow(e.unsigned_abs())
        }
    }

    /// `r^a co^b` as a matrix.
    pub fn monomial(&self, a: i128, b: i128) -> Mat2<F> {
        self.co_pow(b).scale(&self.r_pow(a))
    }

    /// `c_j`, `1 <= j <= k`.
    pub fn c(&self, j: usize) -> &Mat2<F> {
        &self.c[j - 1]
    }

    /// `c_1 + ... + c_k`.
    pub fn c_sum(&self) -> Mat2<F> {
        self.c.iter().fold(Mat2::zero(&self.d), |acc, c| acc.add(c))
    }

    /// `l` as a scalar, when it is one.
    pub fn l_scalar(&self) -> Option<F> {
        self.l.as_scalar()
    }

    /// `c_j / c_1^(2^(j-1))`, in which `d` cancels.
    pub fn cj_over_c1_pow(&self, j: usize) -> Mat2<F> {
        let p = 1i128 << (j - 1);
        let e1 = self.e[1] as i128;
        let ej = self.e[j] as i128;
        let r_exp = (1 - e1) * p - ((1i128 << j) - 1 - ej);
        let co_exp = e1 * p - ej;
        self.monomial(r_exp, co_exp)
    }

    /// The right-hand sides of the closed forms for `(m_{1s}, w_{1s})`,
    /// evaluated as displayed: `(x_1 + c_1 + ... + c_k) * d^(2^(k-1)) / c_k`,
    /// with `x = m` when `t(s) = 0` and the roles of `m_1`, `w_1` swapped
    /// when `t(s) = 1`.
    pub fn closed_form(&self) -> Result<(Mat2<F>, Mat2<F>), CfError> {
        let k = self.k();
        let tail = self.c(k).inv().map_err(|_| CfError::Degenerate("c_k"))?.scale(&self.d.frobenius(k as u32 - 1));
        let sum = self.c_sum();
        let a = self.m1.add(&sum).mul(&tail);
        let b = self.w1.add(&sum).mul(&tail);
        let t = self.s.iter().fold(0u8, |acc, &b| acc ^ b);
        Ok(if t == 0 { (a, b) } else { (b, a) })
    }
}

/// The quantities of `(m_1, w_1)` for the word `s`.
pub fn g_quantities<F: CharTwoField>(m1: &Mat2<F>, w1: &Mat2<F>, s: &[u8]) -> Result<GQuantities<F>, CfError> {
    if s.is_empty() {
        return Err(CfError::HypothesisViolation("s must be nonempty".into()));
    }
    let d = m1.det();
    let r = m1.trace();
    let co = m1.add(w1).add_scalar(&r);
    let co2 = co.square().e00;
    let r_inv = r.inv().map_err(|_| CfError::Degenerate("r"))?;
    let co2_inv = co2.inv().map_err(|_| CfError::Degenerate("co^2"))?;
    let word = crate::seqgen::Word::from_bits(s);
    let e = WordStats::prefix_e(&word)?;
    let mut q = GQuantities {
        s: s.to_vec(),
        m1: m1.clone(),
        w1: w1.clone(),
        d,
        r,
        co,
        co2,
        e,
        c: Vec::new(),
        l: Mat2::zero(m1.entries()[0]),
        r_inv,
        co2_inv,
    };
    let k = s.len();
    for j in 1..=k {
        let ej = q.e[j] as i128;
        let cj = q.monomial(-((1i128 << j) - 1 - ej), -ej).scale(&q.d.frobenius(j as u32 - 1));
        q.c.push(cj);
    }
    let ek = q.e[k] as i128;
    q.l = q.monomial((1i128 << k) - 1 - ek, ek);
    Ok(q)
}

/// Checks that `s` ends in 1 and has an even number of 1's.
pub fn check_period_word(s: &[u8]) -> Result<(), CfError> {
    if s.last() != Some(&1) {
        return Err(CfError::HypothesisViolation("s must end with 1".into()));
    }
    if s.iter().filter(|&&b| b == 1).count() % 2 == 1 {
        return Err(CfError::HypothesisViolation("s must contain an even number of 1's".into()));
    }
    Ok(())
}

/// One generation of the `G` tower: the quantities of
/// `(m_{1s^q}, w_{1s^q})` and `L_q`.
#[derive(Debug, Clone)]
pub struct GTowerState<F> {
    pub gen: usize,
    pub q: GQuantities<F>,
    pub big_l: F,
}

impl<F: CharTwoField> GTowerState<F> {
    /// Generation 0 from `(m_0, w_0)`.
    pub fn new(m0: &Mat2<F>, w0: &Mat2<F>, s: &[u8]) -> Result<Self, CfError> {
        check_period_word(s)?;
        let (m1, w1) = g_tower_word(m0, w0, &[]);
        let q = g_quantities(&m1, &w1, s)?;
        let big_l = q.d.one_like();
        Ok(Self { gen: 0, q, big_l })
    }

    /// `l^(gen)` as a scalar.
    pub fn l(&self) -> F {
        self.q.l.e00.clone()
    }

    /// Generation `gen + 1`, started from `m_0' = m_{1 s(k-1)}`.
    pub fn advance(&self) -> Result<Self, CfError> {
        let s = &self.q.s;
        let (mut m0, mut w0) = (self.q.m1.clone(), self.q.w1.clone());
        for &bit in &s[..s.len() - 1] {
            if bit == 0 {
                m0 = m0.square();
                w0 = w0.square();
            } else {
                let nm = w0.mul(&m0);
                w0 = m0.mul(&w0);
                m0 = nm;
            }
        }
        let (m1, w1) = g_tower_word(&m0, &w0, &[]);
        let q = g_quantities(&m1, &w1, s)?;
        Ok(Self { gen: self.gen + 1, q, big_l: self.big_l.mul(&self.l()) })
    }

    /// `sum_j c_j^(gen) / L_gen`.
    pub fn term(&self) -> Result<Mat2<F>, CfError> {
        Ok(self.q.c_sum().scale(&self.big_l.inv()?))
    }
}

/// Limits of the `G` tower of a normalized spec, as series.
#[derive(Debug, Clone)]
pub struct GLimits {
    pub normalized: Normalized,
    /// The word `s` the tower runs on (one or two periods after the leading 1).
    pub s: Vec<u8>,
    /// `f = lim L_i`.
    pub f: LaurentSeries,
    /// `H_1 = sum_q c_1^(q) / L_q`.
    pub h1: Mat2<LaurentSeries>,
    /// The scalar `H_1 / co` when `e(s(1)) = 1`, else `H_1`.
    pub h: LaurentSeries,
    /// The scalar `sum_q d^(2^(qk)) / L_q^2`, i.e. `H_1 co` when
    /// `e(s(1)) = 1` and `H_1 r` otherwise.
    pub h_d: LaurentSeries,
    /// `f (m_1 + sum_j H_1^(2^(j-1)) c_j / c_1^(2^(j-1)))`.
    pub limit_m: Mat2<LaurentSeries>,
    /// `f (m_1 + sum_q sum_j c_j^(q) / L_q)`, summed term by term.
    pub limit_m_direct: Mat2<LaurentSeries>,
    /// `limit_m_00 / limit_m_01`.
    pub cf: LaurentSeries,
    pub gens: Vec<GTowerState<LaurentSeries>>,
    pub prec: i64,
}

impl GLimits {
    pub fn k(&self) -> usize {
        self.s.len()
    }

    pub fn base(&self) -> &GQuantities<LaurentSeries> {
        &self.gens[0].q
    }

    /// `l` of generation 0.
    pub fn l(&self) -> LaurentSeries {
        self.gens[0].l()
    }
}

const MAX_GENS: usize = 64;

/// Series limits of the `G` tower, every value known below `prec`.
pub fn g_tower_limits(spec: &GSpec, sp: &SpecializationMap, prec: i64) -> Result<GLimits, CfError> {
    sp.covers(&spec.alphabet())?;
    if spec.u0().len() != spec.v0().len() {
        return Err(CfError::UnequalLengths(spec.u0().len(), spec.v0().len()));
    }
    let normalized = g_normalize(spec)?;
    let s = normalized.s.to_bits()?;
    check_period_word(&s)?;
    let k = s.len();
    let ns = &normalized.spec;
    let word_deg: i64 = sp
        .polys(&ns.u0().concat(ns.v0()))?
        .iter()
        .map(|p| p.degree().unwrap_or(0) as i64)
        .sum();
    let wp = prec + 64 + 4 * word_deg;
    let m0 = sp.word_matrix_series(ns.u0(), wp)?;
    let w0 = sp.word_matrix_series(ns.v0(), wp)?;

    // L_i settles once 2^{ik} >= wp; the terms c_j^(q)/L_q have increasing
    // valuations (each generation multiplies c_j by a positive power of d).
    let log = 64 - (wp as u64).leading_zeros() as usize;
    let f_gen = log.div_ceil(k).max(1);
    let mut gens = vec![GTowerState::new(&m0, &w0, &s)?];
    let mut terms = vec![gens[0].term()?];
    if gens[0].q.d.val_or_prec() <= 0 {
        return Err(CfError::HypothesisViolation("val(d) must be positive".into()));
    }
    loop {
        let last = gens.last().expect("nonempty");
        let settled = terms.last().expect("nonempty").min_val() >= wp;
        if last.gen >= f_gen && settled {
            break;
        }
        if last.gen >= MAX_GENS {
            return Err(CfError::Budget { steps: MAX_GENS, achieved: terms.last().expect("nonempty").min_val() });
        }
        let next = last.advance()?;
        terms.push(next.term()?);
        gens.push(next);
    }
    let f = gens[f_gen].big_l.clone();

    let base = &gens[0].q;
    let mut h1 = Mat2::zero(&base.d);
    let mut direct = base.m1.clone();
    for (g, t) in gens.iter().zip(&terms) {
        h1 = h1.add(&g.q.c(1).scale(&g.big_l.inv()?));
        direct = direct.add(t);
    }
    let mut inner = base.m1.clone();
    let mut h_pow = h1.clone();
    for j in 1..=k {
        inner = inner.add(&h_pow.mul(&base.cj_over_c1_pow(j)));
        h_pow = h_pow.square();
    }
    let e1 = base.e[1];
    let (h, h_d) = if e1 == 1 {
        (h1.mul(&base.co_pow(-1)).e00, h1.mul(&base.co).e00)
    } else {
        (h1.e00.clone(), h1.e00.mul(&base.r))
    };
    let limit_m = inner.scale(&f);
    let cf = limit_m.e00.div(&limit_m.e01)?;
    if cf.prec() < prec {
        return Err(CfError::Budget { steps: gens.len(), achieved: cf.prec() });
    }
    Ok(GLimits {
        normalized,
        s,
        f: f.with_prec(prec),
        h1: h1.with_prec(prec),
        h: h.with_prec(prec),
        h_d: h_d.with_prec(prec),
        limit_m: limit_m.with_prec(prec),
        limit_m_direct: direct.scale(&f).with_prec(prec),
        cf: cf.with_prec(prec),
        gens,
        prec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfmat::{cf_prefix_len, cf_series, convergent_exact, word_matrix};
    use crate::field::{Gf2Poly, Gf2Ratio, Gf2mElem};
    use crate::seqgen::{g_prefix, Word};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_mat(rng: &mut ChaCha8Rng) -> Mat2<Gf2mElem> {
        let mut x = || Gf2mElem::sample(16, rng).unwrap();
        Mat2::new(x(), x(), x(), x())
    }

    #[test]
    fn word_recursion_base_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (m0, w0) = (random_mat(&mut rng), random_mat(&mut rng));
        let (m1, w1) = g_tower_word(&m0, &w0, &[]);
        assert_eq!(m1, w0.mul(&m0));
        assert_eq!(w1, m0.mul(&w0));
        assert_eq!(g_tower_word(&m0, &w0, &[0]).0, m1.square());
        let (m11, _) = g_tower_word(&m0, &w0, &[1]);
        assert_eq!(m11, w1.mul(&m1));
        let q = g_quantities(&m1, &w1, &[1, 1]).unwrap();
        assert_eq!(Mat2::scalar(m11.trace()), q.co.square());
    }

    #[test]
    fn correction_terms_of_the_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (m0, w0) = (random_mat(&mut rng), random_mat(&mut rng));
        let (m1, w1) = g_tower_word(&m0, &w0, &[]);
        let q = g_quantities(&m1, &w1, &[1, 1]).unwrap();
        let d = q.d;
        let co_inv = q.co_pow(-1);
        assert_eq!(*q.c(1), co_inv.scale(&d));
        assert_eq!(*q.c(2), q.co_pow(-2).scale(&d.square().div(&q.r).unwrap()));
        assert_eq!(q.l, q.co_pow(2).scale(&q.r));

        let q = g_quantities(&m1, &w1, &[1, 0, 1]).unwrap();
        assert_eq!(*q.c(2), q.co_pow(-3).scale(&d.square()));
        assert_eq!(*q.c(3), q.co_pow(-6).scale(&d.pow(4).div(&q.r).unwrap()));
        assert_eq!(q.l, q.co_pow(6).scale(&q.r));

        let q = g_quantities(&m1, &w1, &[0]).unwrap();
        assert_eq!(*q.c(1), Mat2::scalar(d.div(&q.r).unwrap()));
        assert_eq!(q.l, Mat2::scalar(q.r));
    }

    #[test]
    fn closed_form_for_small_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in [&[0u8][..], &[1], &[1, 1], &[1, 0, 1], &[0, 1, 1, 0]] {
            let (m0, w0) = (random_mat(&mut rng), random_mat(&mut rng));
            let (m1, w1) = g_tower_word(&m0, &w0, &[]);
            let q = g_quantities(&m1, &w1, s).unwrap();
            let (cm, cw) = q.closed_form().unwrap();
            let (m, w) = g_tower_word(&m0, &w0, s);
            assert_eq!(cm, m, "{s:?}");
            assert_eq!(cw, w, "{s:?}");
        }
    }

    #[test]
    fn tower_ratio_matches_convergents() {
        let sp: SpecializationMap = "a=z,b=z+1".parse().unwrap();
        let letter = |c: u8| Gf2Ratio::from_poly(sp.get(c).unwrap().clone());
        let one = Gf2Ratio::from_poly(Gf2Poly::one());
        let m0 = word_matrix(&[letter(b'a')], &one).unwrap();
        let w0 = word_matrix(&[letter(b'b')], &one).unwrap();
        let spec = GSpec::new("a".parse().unwrap(), "b".parse().unwrap(), "1".parse().unwrap()).unwrap();
        for s in [&[][..], &[1], &[1, 1], &[1, 1, 1]] {
            let (m, _) = g_tower_word(&m0, &w0, s);
            let word: Word = g_prefix(&spec, 2 << s.len());
            assert_eq!(m.e00.div(&m.e01).unwrap(), convergent_exact(&word, &sp).unwrap());
        }
    }

    #[test]
    fn thue_morse_limits() {
        let sp: SpecializationMap = "a=z,b=z+1".parse().unwrap();
        let spec = GSpec::new("a".parse().unwrap(), "b".parse().unwrap(), "1".parse().unwrap()).unwrap();
        let lim = g_tower_limits(&spec, &sp, 256).unwrap();
        assert_eq!(lim.s, vec![1, 1]);
        let direct = cf_series(&g_prefix(&spec, cf_prefix_len(256)), &sp, 256).unwrap();
        assert!(lim.cf.add(&direct).valuation().at_least() >= 256);
        assert!(lim.limit_m.agrees(&lim.limit_m_direct));
        let l = lim.l();
        // f^4 = f / l and H^4 / l^2 = H + d
        let f_res = lim.f.frobenius(2).mul(&l).add(&lim.f);
        assert!(f_res.valuation().at_least() >= 224);
        let h = &lim.h_d;
        let h_res = h.frobenius(2).div(&l.square()).unwrap().add(h).add(&lim.base().d);
        assert!(h_res.valuation().at_least() >= 224, "{}", h_res.valuation());
    }

    #[test]
    fn rejects_bad_period_words() {
        assert!(check_period_word(&[1, 0]).is_err());
        assert!(check_period_word(&[0, 1]).is_err());
        assert!(check_period_word(&[1, 0, 1]).is_ok());
    }
}
