//! Drivers that rebuild each continued fraction two ways, check the closed
//! equations of the tower limits, and search for its algebraic relation.

use std::fmt;

use crate::cfmat::{cf_prefix_len, cf_series, g_tower_limits, p_tower_limits, CfError, Mat2, SpecializationMap};
use crate::field::{CharTwoField, LaurentSeries, Valuation};
use crate::identity::Status;
use crate::par::Exec;
use crate::seqgen::{g_prefix, g_sigma, p_prefix, p_to_g, sigma_inv_word, sigma_word, GSpec, PSpec, Word};

use super::{default_degz, find_relation_with, search_relation, verify_relation, AlgError, AlgRelation, SearchOutcome};

/// A series identity `lhs = rhs` checked through the valuation of
/// `lhs - rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCheck {
    pub name: String,
    pub residual: Valuation,
    pub threshold: i64,
    pub holds: bool,
}

impl SeriesCheck {
    fn new(name: &str, residual: Valuation, threshold: i64) -> Self {
        Self { name: name.to_string(), residual, threshold, holds: residual.at_least() >= threshold }
    }

    fn series(name: &str, lhs: &LaurentSeries, rhs: &LaurentSeries, threshold: i64) -> Self {
        Self::new(name, lhs.add(rhs).valuation(), threshold)
    }

    fn matrix(name: &str, lhs: &Mat2<LaurentSeries>, rhs: &Mat2<LaurentSeries>, threshold: i64) -> Self {
        Self::new(name, mat_valuation(&lhs.add(rhs)), threshold)
    }
}

impl fmt::Display for SeriesCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "ok" } else { "FAIL" };
        write!(f, "check {} residual_val={} need>={} {verdict}", self.name, self.residual, self.threshold)
    }
}

fn mat_valuation(m: &Mat2<LaurentSeries>) -> Valuation {
    m.entries().into_iter().map(|e| e.valuation()).min_by_key(|v| v.at_least()).expect("four entries")
}

/// Residual threshold for identities between limits: `7/8` of the
/// precision, leaving room for the precision lost in divisions.
fn identity_threshold(prec: i64) -> i64 {
    prec - prec / 8
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub id: String,
    pub spec: String,
    pub prec: i64,
    /// `2^n` or `2^k`.
    pub degree_bound: usize,
    pub checks: Vec<SeriesCheck>,
    pub search: SearchOutcome,
    /// Informational lines (not part of the verdict).
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn degree(&self) -> Option<usize> {
        self.search.degree()
    }

    pub fn checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn status(&self) -> Status {
        let within = self.degree().is_some_and(|d| d <= self.degree_bound);
        if within && self.checks_hold() {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn check(&self, name: &str) -> Option<&SeriesCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degree = self.degree().map_or("none".to_string(), |d| d.to_string());
        writeln!(
            f,
            "{} {} spec=[{}] degree={} bound={} prec={}",
            self.id,
            self.status(),
            self.spec,
            degree,
            self.degree_bound,
            self.prec
        )?;
        writeln!(f, "{}", self.search.summary())?;
        if let Some(rel) = &self.search.relation {
            writeln!(f, "relation {rel}")?;
        }
        for line in &self.search.log {
            writeln!(f, "search {line}")?;
        }
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for n in &self.notes {
            writeln!(f, "note {n}")?;
        }
        Ok(())
    }
}

fn direct_pair(word: impl Fn(usize) -> Word, sp: &SpecializationMap, prec: i64) -> Result<(LaurentSeries, LaurentSeries), CfError> {
    let lo = cf_series(&word(cf_prefix_len(prec)), sp, prec)?;
    let hi = cf_series(&word(cf_prefix_len(2 * prec)), sp, 2 * prec)?;
    Ok((lo, hi))
}

/// `P` sequences: the tower limit against direct convergents, the equations
/// for `f`, `H_0` and `H_j`, and a relation of degree at most `2^n` where
/// `n = |eps|`.
///
/// `H_0` is checked in the form
/// `H_0^(2^n) lambda L_1^(2^n - 1) / L_n^2 = H_0 + d_0 / L_1`
/// and `H_j` as `H_0^(2^j) (d_j / d_0^(2^j)) (L_1^(2^j) / L_{j+1})`; both
/// follow from summing the period shift of the terms.
pub fn check_theorem1(spec: &PSpec, sp: &SpecializationMap, prec: i64, exec: Exec) -> Result<TheoremReport, AlgError> {
    let n = spec.period();
    let bound = 1usize << n;
    let lim = p_tower_limits(spec, sp, prec)?;
    let (phi, phi_hi) = direct_pair(|len| p_prefix(spec, len), sp, prec)?;
    let thr = identity_threshold(prec);
    let st = &lim.states;
    let big_l = |i: usize| st[i].big_l.clone();
    let (l1, ln) = (big_l(1), big_l(n));
    let h0 = &lim.h[0];
    let d0 = &st[0].d;

    let mut checks = vec![SeriesCheck::series("cf_tower=cf_direct", &lim.cf, &phi, prec)];
    checks.push(SeriesCheck::series("f^(2^n)*L_n=f", &lim.f.frobenius(n as u32).mul(&ln), &lim.f, thr));
    let h0_lhs = h0.frobenius(n as u32).mul(&lim.lambda).mul(&l1.pow((bound - 1) as u128)).div(&ln.square())?;
    let h0_rhs = h0.add(&d0.div(&l1)?);
    checks.push(SeriesCheck::series("H_0 equation", &h0_lhs, &h0_rhs, thr));
    for j in 1..n {
        let want = h0
            .frobenius(j as u32)
            .mul(&st[j].d)
            .div(&d0.frobenius(j as u32))?
            .mul(&l1.frobenius(j as u32))
            .div(&big_l(j + 1))?;
        checks.push(SeriesCheck::series(&format!("H_{j} equation"), &lim.h[j], &want, thr));
    }

    let literal = h0.frobenius(n as u32).mul(&lim.lambda).div(&l1)?;
    let mut notes = vec![format!(
        "H_0^(2^n)*lambda/L_1 = H_0 + d_0/L_1 residual_val={} (the form with lambda/L_1 alone; equal to the checked form when n = 1)",
        literal.add(&h0_rhs).valuation()
    )];
    notes.push(format!("lambda val={}", lim.lambda.valuation()));

    let degz = default_degz(bound, sp.max_degree());
    let search = search_relation(&phi, &phi_hi, bound, degz, exec)?;
    if let Some(rel) = &search.relation {
        notes.push(format!("tower cf residual under relation: {}", verify_relation(rel, &lim.cf)));
    }
    Ok(TheoremReport { id: "theorem1".into(), spec: spec.to_string(), prec, degree_bound: bound, checks, search, notes })
}

/// `G` sequences. The tower runs on the normalized spec; the checks cover
/// the limit against direct convergents, `f^(2^k) l = f`,
/// `H^(2^k) / l^2 = H + d` for `H = sum_q d^(2^(qk)) / L_q^2`, the matrix
/// equation `H_1^(2^k) (c_1'/l) c_1^-(2^k) = c_1 + H_1`, and its scalar form.
/// An all-zero `ups` makes the sequence `u0 u0 u0 ...`, whose continued
/// fraction is periodic and gets a degree-2 search instead.
pub fn check_theorem2(spec: &GSpec, sp: &SpecializationMap, prec: i64, exec: Exec) -> Result<TheoremReport, AlgError> {
    if spec.ups_weight() == 0 {
        return periodic_case(spec, sp, prec, exec);
    }
    let lim = g_tower_limits(spec, sp, prec)?;
    let k = lim.k();
    let bound = 1usize << k;
    let (phi, phi_hi) = direct_pair(|len| g_prefix(spec, len), sp, prec)?;
    let thr = identity_threshold(prec);
    let l = lim.l();
    let base = lim.base();
    let kk = k as u32;

    let mut checks = vec![
        SeriesCheck::series("cf_tower=cf_direct", &lim.cf, &phi, prec),
        SeriesCheck::matrix("limit_m=limit_m_direct", &lim.limit_m, &lim.limit_m_direct, thr),
        SeriesCheck::series("f^(2^k)*l=f", &lim.f.frobenius(kk).mul(&l), &lim.f, thr),
    ];
    let hd = &lim.h_d;
    checks.push(SeriesCheck::series(
        "H^(2^k)/l^2=H+d",
        &hd.frobenius(kk).div(&l.square())?,
        &hd.add(&base.d),
        thr,
    ));

    // X = (c_1'/l) c_1^-(2^k); H_1^(2^k) X = H_1 + c_1
    let c1 = base.c(1);
    let c1p = lim.gens[1].q.c(1);
    let x = c1p.scale(&l.inv()?).mul(&c1.frobenius(kk).inv()?);
    let h1 = &lim.h1;
    checks.push(SeriesCheck::matrix("H_1 equation", &h1.frobenius(kk).mul(&x), &h1.add(c1), thr));

    let mut notes = vec![format!("s={} e(s(1))={}", Word::from_bits(&lim.s), base.e[1])];
    if lim.normalized.doubled {
        notes.push("one period of ups has an odd number of 1's; s spans two periods".into());
    }
    if base.e[1] == 1 {
        // H = H_1/co is scalar; dividing the matrix equation by co gives
        // H^(2^k) co^(2^k) X / co = H + c_1 / co.
        let co_inv = base.co_pow(-1);
        let hm = h1.mul(&co_inv);
        let off = Mat2::new(hm.e00.add(&hm.e11), hm.e01.clone(), hm.e10.clone(), LaurentSeries::zero(prec));
        checks.push(SeriesCheck::new("H_1/co scalar", mat_valuation(&off), thr));
        let h = Mat2::scalar(lim.h.clone());
        let co_2k = base.co_pow(1 << k);
        let lhs = h.frobenius(kk).mul(&co_2k).mul(&x).mul(&co_inv);
        let rhs = h.add(&c1.mul(&co_inv));
        checks.push(SeriesCheck::matrix("H equation (co^(2^k)/co)", &lhs, &rhs, thr));
        let literal = h.frobenius(kk).mul(&co_2k).mul(&x);
        notes.push(format!(
            "H equation with co^(2^k) not divided by co: residual_val={}",
            mat_valuation(&literal.add(&rhs))
        ));
    } else {
        let off = Mat2::new(h1.e00.add(&h1.e11), h1.e01.clone(), h1.e10.clone(), LaurentSeries::zero(prec));
        checks.push(SeriesCheck::new("H_1 scalar", mat_valuation(&off), thr));
    }

    let degz = default_degz(bound, sp.max_degree());
    let search = search_relation(&phi, &phi_hi, bound, degz, exec)?;
    Ok(TheoremReport { id: "theorem2".into(), spec: spec.to_string(), prec, degree_bound: bound, checks, search, notes })
}

fn periodic_case(spec: &GSpec, sp: &SpecializationMap, prec: i64, exec: Exec) -> Result<TheoremReport, AlgError> {
    let (phi, phi_hi) = direct_pair(|len| g_prefix(spec, len), sp, prec)?;
    let u0 = spec.u0();
    if u0.is_empty() {
        return Err(AlgError::Seq(crate::seqgen::SeqError::Degenerate));
    }
    // u0 u0 u0 ... directly, independent of the G recursion
    let periodic = |len: usize| Word::new(u0.letters().iter().copied().cycle().take(len).collect()).expect("letters of u0");
    let (rep, _) = direct_pair(periodic, sp, prec)?;
    let checks = vec![SeriesCheck::series("cf=cf(u0 u0 ...)", &phi, &rep, prec)];
    let search = search_relation(&phi, &phi_hi, 2, default_degz(2, sp.max_degree()), exec)?;
    Ok(TheoremReport {
        id: "theorem2".into(),
        spec: spec.to_string(),
        prec,
        degree_bound: 2,
        checks,
        search,
        notes: vec!["ups is identically 0: the sequence is periodic".into()],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorollaryReport {
    pub spec: PSpec,
    pub k: usize,
    pub gspec: GSpec,
    /// `2^n`, `n = |eps|`.
    pub degree_bound: usize,
    /// Tower limit of the `G` spec against direct convergents of `sigma^k`
    /// applied to a prefix of the `P` sequence.
    pub oracle: SeriesCheck,
    pub theorem: TheoremReport,
}

impl CorollaryReport {
    pub fn status(&self) -> Status {
        let within = self.theorem.degree().is_some_and(|d| d <= self.degree_bound);
        if within && self.oracle.holds && self.theorem.checks_hold() {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for CorollaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degree = self.theorem.degree().map_or("none".to_string(), |d| d.to_string());
        writeln!(
            f,
            "corollary {} spec=[{}] k={} sigma^k=[{}] degree={} bound={}",
            self.status(),
            self.spec,
            self.k,
            self.gspec,
            degree,
            self.degree_bound
        )?;
        writeln!(f, "{}", self.oracle)?;
        write!(f, "{}", self.theorem)
    }
}

/// `sigma^k` of a binary `P` sequence as a `G` spec, checked as in
/// [`check_theorem2`] against the bound `2^n`.
pub fn check_corollary(
    spec: &PSpec,
    sp: &SpecializationMap,
    k: usize,
    prec: i64,
    exec: Exec,
) -> Result<CorollaryReport, AlgError> {
    if k == 0 {
        return Err(AlgError::Hypothesis("k must be at least 1".into()));
    }
    let mut g = p_to_g(spec)?;
    for _ in 1..k {
        g = g_sigma(&g)?;
    }
    let theorem = check_theorem2(&g, sp, prec, exec)?;
    let mut word = p_prefix(spec, cf_prefix_len(prec));
    for _ in 0..k {
        word = sigma_word(&word)?;
    }
    let oracle_cf = cf_series(&word, sp, prec)?;
    let tower_cf = g_tower_limits(&g, sp, prec)?.cf;
    let oracle = SeriesCheck::series("cf_tower=cf(sigma^k(prefix))", &tower_cf, &oracle_cf, prec);
    Ok(CorollaryReport { spec: spec.clone(), k, gspec: g, degree_bound: 1 << spec.period(), oracle, theorem })
}

/// The continued fraction of the differences `w_n + w_{n+1}` of a `P`
/// sequence, known below `prec`.
pub fn sigma_inv_series(spec: &PSpec, sp: &SpecializationMap, prec: i64) -> Result<LaurentSeries, AlgError> {
    let word = sigma_inv_word(&p_prefix(spec, cf_prefix_len(prec) + 1))?;
    Ok(cf_series(&word, sp, prec)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExploreOutcome {
    None,
    Found { relation: AlgRelation, residual: Valuation },
    /// A relation at the discovery precision that failed re-verification.
    Discarded { relation: AlgRelation, residual: Valuation },
    Infeasible { required: i64 },
}

/// Observation only: a bounded search on the continued fraction of
/// `sigma^-1` of a `P` sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExploreReport {
    pub spec: PSpec,
    pub degx: usize,
    pub degz: usize,
    pub prec: i64,
    pub outcome: ExploreOutcome,
}

impl fmt::Display for ExploreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (d, b, p) = (self.degx, self.degz, self.prec);
        match &self.outcome {
            ExploreOutcome::None => write!(f, "no relation found up to degree {d}, degZ {b}, prec {p}"),
            ExploreOutcome::Found { relation, residual } => {
                write!(f, "relation found: {relation} ({})", relation.report_line(*residual, 2 * p))
            }
            ExploreOutcome::Discarded { relation, residual } => write!(
                f,
                "no relation found up to degree {d}, degZ {b}, prec {p} (candidate of degree {} discarded at prec {}: residual_val={residual})",
                relation.degx(),
                2 * p
            ),
            ExploreOutcome::Infeasible { required } => write!(
                f,
                "search not run: degree {d}, degZ {b} needs prec {required}, have {p}"
            ),
        }
    }
}

/// Runs one search with exactly the bounds `degx`, `degz` at `prec`, with
/// the same re-verification gate as the theorem checks.
pub fn explore_sigma_inv(
    spec: &PSpec,
    sp: &SpecializationMap,
    degx: usize,
    degz: usize,
    prec: i64,
    exec: Exec,
) -> Result<ExploreReport, AlgError> {
    let phi = sigma_inv_series(spec, sp, prec)?;
    let outcome = match find_relation_with(&phi, degx, degz, exec) {
        Err(AlgError::Precision { required, .. }) => ExploreOutcome::Infeasible { required },
        Err(e) => return Err(e),
        Ok(None) => ExploreOutcome::None,
        Ok(Some(relation)) => {
            let hi = sigma_inv_series(spec, sp, 2 * prec)?;
            let residual = verify_relation(&relation, &hi);
            if residual.at_least() >= prec + prec / 2 {
                ExploreOutcome::Found { relation, residual }
            } else {
                ExploreOutcome::Discarded { relation, residual }
            }
        }
    };
    Ok(ExploreReport { spec: spec.clone(), degx, degz, prec, outcome })
}
