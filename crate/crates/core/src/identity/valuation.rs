//! Valuation facts along the towers, measured on specialized sequences.
//!
//! `P` determinants and `m_{k,00}` are measured exactly on rational
//! functions; the `L` differences come from the series towers.

use std::fmt;

use crate::cfmat::{g_tower_limits, p_tower_limits, word_matrix, CfError, PTowerState, SpecializationMap};
use crate::field::{CharTwoField, Gf2Poly, Gf2Ratio, LaurentSeries, Valuation};
use crate::seqgen::{GSpec, PSpec};

use super::Status;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Ge,
    Gt,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        })
    }
}

/// One measured valuation against its claimed value or bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationCheck {
    /// Family of the fact, e.g. `val(d_j)>=2^(2j)`.
    pub fact: String,
    /// Step, generation or index the measurement belongs to.
    pub index: usize,
    pub measured: Valuation,
    pub rel: Rel,
    pub bound: i64,
    pub holds: bool,
}

impl ValuationCheck {
    fn new(fact: &str, index: usize, measured: Valuation, rel: Rel, bound: i64) -> Self {
        let v = measured.at_least();
        let holds = match (rel, measured) {
            (Rel::Eq, Valuation::Finite(x)) => x == bound,
            (Rel::Eq, Valuation::ZeroTo(_)) => false,
            (Rel::Ge, _) => v >= bound,
            (Rel::Gt, _) => v > bound,
        };
        Self { fact: fact.to_string(), index, measured, rel, bound, holds }
    }
}

impl fmt::Display for ValuationCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} index={} measured={} claim{}{} {}",
            self.fact,
            self.index,
            self.measured,
            self.rel,
            self.bound,
            if self.holds { "ok" } else { "VIOLATED" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationReport {
    pub id: String,
    pub checks: Vec<ValuationCheck>,
}

impl ValuationReport {
    pub fn status(&self) -> Status {
        if self.checks.iter().all(|c| c.holds) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Whether every check of one fact family holds.
    pub fn fact_holds(&self, fact: &str) -> bool {
        self.checks.iter().filter(|c| c.fact == fact).all(|c| c.holds)
    }

    pub fn facts(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for c in &self.checks {
            if !out.contains(&c.fact.as_str()) {
                out.push(&c.fact);
            }
        }
        out
    }

    pub fn violations(&self) -> impl Iterator<Item = &ValuationCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

impl fmt::Display for ValuationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} checks={} violations={}", self.id, self.status(), self.checks.len(), self.violations().count())
    }
}

pub const FACT_M00: &str = "val(m_k00)=0";
pub const FACT_D_BOUND: &str = "val(d_j)>=2^(2j)";
pub const FACT_D_REC: &str = "val(d_j+1)=2val(d_j)+2deg(eps_j)";
pub const FACT_P_L: &str = "val(L_(k+1)n-L_kn)>=2^(kn)";
pub const FACT_G_D: &str = "val(d)>0";
pub const FACT_G_R: &str = "val(r)=0";
pub const FACT_G_CO00: &str = "val(co_00)=0";
pub const FACT_G_CO11: &str = "val(co_11)=0";
pub const FACT_G_L: &str = "val(L_i+1-L_i)>=2^(ik)";

fn ratio_val(x: &Gf2Ratio) -> Valuation {
    match (x.num().degree(), x.den().degree()) {
        (Some(n), Some(d)) => Valuation::Finite(d as i64 - n as i64),
        _ => Valuation::ZeroTo(i64::MAX),
    }
}

fn series_diff(a: &LaurentSeries, b: &LaurentSeries) -> Valuation {
    a.add(b).valuation()
}

/// `P` tower facts for steps `0..=depth` (exact) and the `L` settling bound
/// for every `k` with `2^(kn) < prec` (series at `prec`).
pub fn check_valuation_bounds_p(
    spec: &PSpec,
    sp: &SpecializationMap,
    depth: usize,
    prec: i64,
) -> Result<ValuationReport, CfError> {
    sp.covers(&spec.alphabet())?;
    let val = |c: u8| -> Result<Gf2Ratio, CfError> { Ok(Gf2Ratio::from_poly(sp.get(c)?.clone())) };
    let one = Gf2Ratio::from_poly(Gf2Poly::one());
    let w0: Vec<Gf2Ratio> = spec.w0().letters().iter().map(|&c| val(c)).collect::<Result<_, _>>()?;
    let mut st = vec![PTowerState::new(word_matrix(&w0, &one)?, val(spec.eps_at(0))?)?];
    for i in 1..=depth {
        let next = st[i - 1].advance(&val(spec.eps_at(i))?)?;
        st.push(next);
    }

    let mut checks = Vec::new();
    for (k, s) in st.iter().enumerate() {
        checks.push(ValuationCheck::new(FACT_M00, k, ratio_val(&s.m.e00), Rel::Eq, 0));
    }
    for (j, s) in st.iter().enumerate() {
        checks.push(ValuationCheck::new(FACT_D_BOUND, j, ratio_val(&s.d), Rel::Ge, 1i64 << (2 * j)));
    }
    for j in 0..depth {
        let deg_eps = sp.get(spec.eps_at(j))?.degree().unwrap_or(0) as i64;
        let want = 2 * ratio_val(&st[j].d).at_least() + 2 * deg_eps;
        checks.push(ValuationCheck::new(FACT_D_REC, j + 1, ratio_val(&st[j + 1].d), Rel::Eq, want));
    }

    let lim = p_tower_limits(spec, sp, prec)?;
    let n = lim.period;
    let last = lim.states.len() - 1;
    let big_l = |i: usize| if i <= last { lim.states[i].big_l.clone() } else { lim.states[last].big_l_next() };
    let mut k = 0;
    while (k * n) < 63 && (1i64 << (k * n)) < prec && (k + 1) * n <= last + 1 {
        let diff = series_diff(&big_l((k + 1) * n), &big_l(k * n));
        checks.push(ValuationCheck::new(FACT_P_L, k, diff, Rel::Ge, 1i64 << (k * n)));
        k += 1;
    }
    Ok(ValuationReport { id: format!("p.valuation[{spec}]"), checks })
}

/// `G` tower facts: `val(d) > 0`, `val(r) = 0`, `val(co_00) = val(co_11) = 0`
/// and `val(L_{i+1} - L_i) >= 2^(ik)` for every `i` with `2^(ik) < prec`.
pub fn check_valuation_bounds_g(spec: &GSpec, sp: &SpecializationMap, prec: i64) -> Result<ValuationReport, CfError> {
    let lim = g_tower_limits(spec, sp, prec)?;
    let q = lim.base();
    let k = lim.k();
    let mut checks = vec![
        ValuationCheck::new(FACT_G_D, 0, q.d.valuation(), Rel::Gt, 0),
        ValuationCheck::new(FACT_G_R, 0, q.r.valuation(), Rel::Eq, 0),
        ValuationCheck::new(FACT_G_CO00, 0, q.co.e00.valuation(), Rel::Eq, 0),
        ValuationCheck::new(FACT_G_CO11, 0, q.co.e11.valuation(), Rel::Eq, 0),
    ];
    let gens = &lim.gens;
    let mut i = 0;
    while i * k < 63 && (1i64 << (i * k)) < prec && i + 1 < gens.len() {
        let diff = series_diff(&gens[i + 1].big_l, &gens[i].big_l);
        checks.push(ValuationCheck::new(FACT_G_L, i, diff, Rel::Ge, 1i64 << (i * k)));
        i += 1;
    }
    Ok(ValuationReport { id: format!("g.valuation[{spec}]"), checks })
}
