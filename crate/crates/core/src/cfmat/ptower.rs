//! The tower `m_{n+1} = m_n A(eps_n) m_n` of a `P(W0, eps)` sequence.

use crate::field::{CharTwoField, LaurentSeries};
use crate::seqgen::PSpec;

use super::{b_matrix, letter_matrix, letter_matrix_series, CfError, Mat2, SpecializationMap};

/// One step of the tower: `m_n`, `d_n = det m_n`, `b_n = A(eps_n) + I`,
/// `l_n = (m_{n,01} + m_{n,10}) / eps_n + m_{n,00}` and `L_n`.
#[derive(Debug, Clone)]
pub struct PTowerState<F> {
    pub step: usize,
    pub eps: F,
    pub m: Mat2<F>,
    pub d: F,
    pub b: Mat2<F>,
    pub l: F,
    pub big_l: F,
}

fn l_value<F: CharTwoField>(m: &Mat2<F>, eps: &F) -> Result<F, CfError> {
    Ok(m.e01.add(&m.e10).div(eps)?.add(&m.e00))
}

impl<F: CharTwoField> PTowerState<F> {
    /// State 0 with `L_0 = 1`.
    pub fn new(m0: Mat2<F>, eps0: F) -> Result<Self, CfError> {
        if eps0.is_zero() {
            return Err(CfError::ZeroPartialQuotient);
        }
        Ok(Self {
            step: 0,
            d: m0.det(),
            b: b_matrix(&eps0)?,
            l: l_value(&m0, &eps0)?,
            big_l: eps0.one_like(),
            m: m0,
            eps: eps0,
        })
    }

    /// `L_{n+1} = L_n l_n`.
    pub fn big_l_next(&self) -> F {
        self.big_l.mul(&self.l)
    }

    /// The next state, given `eps_{n+1}`.
    pub fn advance(&self, eps_next: &F) -> Result<Self, CfError> {
        if eps_next.is_zero() {
            return Err(CfError::ZeroPartialQuotient);
        }
        let m = self.m.mul(&letter_matrix(&self.eps)?).mul(&self.m);
        Ok(Self {
            step: self.step + 1,
            d: m.det(),
            b: b_matrix(eps_next)?,
            l: l_value(&m, eps_next)?,
            big_l: self.big_l_next(),
            m,
            eps: eps_next.clone(),
        })
    }
}

impl PTowerState<LaurentSeries> {
    /// `step=<n> val(d)=<v> val(L-1)=<v>`
    pub fn trace_line(&self) -> String {
        let lm1 = self.big_l.add(&LaurentSeries::one());
        format!("step={} val(d)={} val(L-1)={}", self.step, self.d.valuation(), lm1.valuation())
    }
}

/// `lambda = 1 / (eps_0^(2^n) eps_1^(2^(n-1)) ... eps_{n-1}^2)` for one
/// period `eps_0 .. eps_{n-1}`.
pub fn p_lambda<F: CharTwoField>(period: &[F]) -> Result<F, CfError> {
    let n = period.len();
    let mut den = period[0].one_like();
    for (i, e) in period.iter().enumerate() {
        den = den.mul(&e.frobenius((n - i) as u32));
    }
    Ok(den.inv()?)
}

/// Limits of the tower of a `P` spec under a specialization, as series.
#[derive(Debug, Clone)]
pub struct PLimits {
    /// Period `n` of `eps`.
    pub period: usize,
    /// `f = lim L_{kn}`.
    pub f: LaurentSeries,
    /// `H_j = sum_k d_{kn+j} / L_{kn+j+1}` for `j < n`.
    pub h: Vec<LaurentSeries>,
    /// `f (m_0 + b_0 H_0 + ... + b_{n-1} H_{n-1})`.
    pub limit_m: Mat2<LaurentSeries>,
    /// The continued fraction `limit_m_00 / limit_m_01`.
    pub cf: LaurentSeries,
    /// `eps_i` specialized, one period, truncated at the working precision.
    pub eps: Vec<LaurentSeries>,
    pub lambda: LaurentSeries,
    /// Every state computed, in order.
    pub states: Vec<PTowerState<LaurentSeries>>,
    pub prec: i64,
}

const MAX_STEPS: usize = 96;

/// Series limits of the `P` tower, every value known below `prec`.
pub fn p_tower_limits(spec: &PSpec, sp: &SpecializationMap, prec: i64) -> Result<PLimits, CfError> {
    sp.covers(&spec.alphabet())?;
    let n = spec.period();
    let w0_deg: i64 = sp.polys(spec.w0())?.iter().map(|p| p.degree().unwrap_or(0) as i64).sum();
    let wp = prec + 64 + 4 * w0_deg + 4 * sp.max_degree() as i64;

    let mut m0 = Mat2::identity(&LaurentSeries::one());
    for &c in spec.w0().letters() {
        m0 = letter_matrix_series(sp.get(c)?, wp)?.mul(&m0);
    }
    let eps: Vec<LaurentSeries> = (0..n)
        .map(|i| Ok(LaurentSeries::from_poly(sp.get(spec.eps_at(i))?).with_prec(wp)))
        .collect::<Result<_, CfError>>()?;
    let eps_at = |i: usize| -> LaurentSeries { eps[i % n].clone() };

    // Stop once L_{kn} has settled (val(L_{(k+1)n} - L_{kn}) >= 2^{kn}) and
    // every further d_i is invisible at the working precision (val(d_i) is
    // increasing, since val(d_{i+1}) = 2 val(d_i) + 2 deg eps_i).
    let log = 64 - (wp as u64).leading_zeros() as usize;
    let f_step = log.div_ceil(n) * n;
    let mut states = vec![PTowerState::new(m0, eps_at(0))?];
    loop {
        let last = states.last().expect("nonempty");
        if last.step >= f_step && last.d.val_or_prec() >= wp {
            break;
        }
        if last.step >= MAX_STEPS {
            return Err(CfError::Budget { steps: MAX_STEPS, achieved: last.d.val_or_prec() });
        }
        let next = last.advance(&eps_at(last.step + 1))?;
        states.push(next);
    }
    let last_step = states.len() - 1;
    let big_l = |i: usize| -> LaurentSeries {
        if i <= last_step {
            states[i].big_l.clone()
        } else {
            states[last_step].big_l_next()
        }
    };

    let f = big_l(f_step);
    let mut h = vec![LaurentSeries::zero(wp); n];
    for (i, st) in states.iter().enumerate() {
        let term = st.d.div(&big_l(i + 1))?;
        h[i % n] = h[i % n].add(&term);
    }
    let mut inner = states[0].m.clone();
    for j in 0..n {
        inner = inner.add(&b_matrix(&eps_at(j))?.scale(&h[j]));
    }
    let limit_m = inner.scale(&f);
    let cf = limit_m.e00.div(&limit_m.e01)?;
    if cf.prec() < prec {
        return Err(CfError::Budget { steps: last_step, achieved: cf.prec() });
    }
    let lambda = p_lambda(&eps)?;
    Ok(PLimits {
        period: n,
        f: f.with_prec(prec),
        h: h.iter().map(|x| x.with_prec(prec)).collect(),
        limit_m: limit_m.with_prec(prec),
        cf: cf.with_prec(prec),
        eps,
        lambda,
        states,
        prec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfmat::{cf_prefix_len, cf_series, convergent_exact, word_matrix};
    use crate::field::{Gf2Poly, Gf2Ratio};
    use crate::seqgen::{p_prefix, Word};

    fn ratio_tower(spec: &PSpec, sp: &SpecializationMap, steps: usize) -> Vec<PTowerState<Gf2Ratio>> {
        let val = |c: u8| Gf2Ratio::from_poly(sp.get(c).unwrap().clone());
        let one = Gf2Ratio::from_poly(Gf2Poly::one());
        let w0: Vec<Gf2Ratio> = spec.w0().letters().iter().map(|&c| val(c)).collect();
        let m0 = word_matrix(&w0, &one).unwrap();
        let mut states = vec![PTowerState::new(m0, val(spec.eps_at(0))).unwrap()];
        for i in 1..=steps {
            let next = states.last().unwrap().advance(&val(spec.eps_at(i))).unwrap();
            states.push(next);
        }
        states
    }

    #[test]
    fn tower_ratio_matches_convergents() {
        let sp: SpecializationMap = "a=z,b=z+1,0=z,1=z+1".parse().unwrap();
        for (w0, eps) in [("a", "b"), ("ab", "ba"), ("", "10"), ("1", "110")] {
            let spec = PSpec::new(w0.parse().unwrap(), eps.parse().unwrap()).unwrap();
            for st in ratio_tower(&spec, &sp, 5) {
                let word = spec.word(st.step);
                if word.is_empty() {
                    continue;
                }
                let cf = convergent_exact(&word, &sp).unwrap();
                assert_eq!(st.m.e00.div(&st.m.e01).unwrap(), cf, "{w0} {eps} step {}", st.step);
            }
        }
    }

    #[test]
    fn one_step_example() {
        let sp: SpecializationMap = "a=z,b=z+1".parse().unwrap();
        let spec = PSpec::new("a".parse().unwrap(), "b".parse().unwrap()).unwrap();
        let states = ratio_tower(&spec, &sp, 1);
        let aba: Word = "aba".parse().unwrap();
        let m = &states[1].m;
        assert_eq!(m.e00.div(&m.e01).unwrap(), convergent_exact(&aba, &sp).unwrap());
        // l_0 = (1/a + 1/a)/eps_0 + 1 = 1
        assert!(states[0].l.is_one());
        assert!(states[1].big_l.is_one());
    }

    #[test]
    fn determinant_and_l_recurrences() {
        let sp: SpecializationMap = "a=z,b=z+1,c=z^2+z+1".parse().unwrap();
        let spec = PSpec::new("ca".parse().unwrap(), "bca".parse().unwrap()).unwrap();
        let states = ratio_tower(&spec, &sp, 6);
        for pair in states.windows(2) {
            let (s, t) = (&pair[0], &pair[1]);
            let det_a = letter_matrix(&s.eps).unwrap().det();
            assert_eq!(t.d, s.d.square().mul(&det_a));
            assert_eq!(t.big_l, s.big_l.mul(&s.l));
        }
    }

    #[test]
    fn lambda_for_period_two() {
        let e0 = Gf2Ratio::from_poly(Gf2Poly::z());
        let e1 = Gf2Ratio::from_poly("z+1".parse().unwrap());
        let lam = p_lambda(&[e0.clone(), e1.clone()]).unwrap();
        assert_eq!(lam, e0.pow(4).mul(&e1.pow(2)).inv().unwrap());
    }

    #[test]
    fn limits_agree_with_direct_convergents() {
        let sp = SpecializationMap::default_binary();
        for (w0, eps) in [("", "1"), ("", "10"), ("01", "100")] {
            let spec = PSpec::new(w0.parse().unwrap(), eps.parse().unwrap()).unwrap();
            let lim = p_tower_limits(&spec, &sp, 256).unwrap();
            let direct = cf_series(&p_prefix(&spec, cf_prefix_len(256)), &sp, 256).unwrap();
            let diff = lim.cf.add(&direct);
            assert!(diff.valuation().at_least() >= 256, "{w0} {eps}: {}", diff.valuation());
            // f^(2^n) L_n = f
            let n = lim.period;
            let lhs = lim.f.frobenius(n as u32).mul(&lim.states[n].big_l);
            assert!(lhs.add(&lim.f).valuation().at_least() >= 256);
        }
    }
}
