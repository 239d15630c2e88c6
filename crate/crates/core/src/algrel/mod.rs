//! Algebraic relations `p_0(z) + p_1(z) X + ... + p_D(z) X^D` for series in
//! `1/z`, found as kernel vectors of the GF(2) system "every known
//! coefficient of `sum p_i phi^i` vanishes".

mod kernel;
mod theorems;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cfmat::CfError;
use crate::field::{CharTwoField, FieldError, Gf2Poly, LaurentSeries, Valuation};
use crate::par::Exec;
use crate::seqgen::SeqError;

pub use kernel::BitMatrix;
pub use theorems::{
    check_corollary, check_theorem1, check_theorem2, explore_sigma_inv, sigma_inv_series, CorollaryReport,
    ExploreOutcome, ExploreReport, SeriesCheck, TheoremReport,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("algrel: precision {available} too low for degX {degx}, degZ {degz} (need at least {required})")]
    Precision { required: i64, available: i64, degx: usize, degz: usize },
    #[error("algrel: cannot parse relation '{0}'")]
    Parse(String),
    #[error("algrel: degX must be at least 1")]
    ZeroDegree,
    #[error("algrel: hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("{0}")]
    Cf(#[from] CfError),
    #[error("algrel: {0}")]
    Seq(#[from] SeqError),
}

impl From<FieldError> for AlgError {
    fn from(e: FieldError) -> Self {
        AlgError::Cf(CfError::Field(e))
    }
}

/// `sum_i coeffs[i](z) X^i` with `degz` the coefficient degree bound it was
/// searched under and `verified_prec` the residual valuation it reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgRelation {
    pub coeffs: Vec<Gf2Poly>,
    pub degz_bound: usize,
    pub verified_prec: i64,
}

impl AlgRelation {
    pub fn new(coeffs: Vec<Gf2Poly>, degz_bound: usize) -> Self {
        let mut rel = Self { coeffs, degz_bound, verified_prec: 0 };
        rel.normalize();
        rel
    }

    /// Drops trailing zero coefficients and divides by the content.
    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Gf2Poly::is_zero) {
            self.coeffs.pop();
        }
        let content = self.coeffs.iter().fold(Gf2Poly::zero(), |g, p| g.gcd(p));
        if !content.is_zero() && !content.is_one() {
            for p in &mut self.coeffs {
                *p = p.div_exact(&content).expect("content divides every coefficient");
            }
        }
    }

    /// Degree in `X`.
    pub fn degx(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Largest coefficient degree.
    pub fn degz(&self) -> usize {
        self.coeffs.iter().filter_map(Gf2Poly::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `degree=<d> degZ=<b> residual_val=<v> prec=<p>`
    pub fn report_line(&self, residual: Valuation, prec: i64) -> String {
        format!("degree={} degZ={} residual_val={} prec={}", self.degx(), self.degz(), residual, prec)
    }
}

impl fmt::Display for AlgRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| format!("X^{i}*({p})"))
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

impl FromStr for AlgRelation {
    type Err = AlgError;

    /// Parses the text form `X^i*(poly) + ...`; the term order is free.
    fn from_str(s: &str) -> Result<Self, AlgError> {
        let bad = || AlgError::Parse(s.to_string());
        let mut coeffs: Vec<Gf2Poly> = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix("X^").ok_or_else(bad)?;
            let (exp, after) = body.split_once("*(").ok_or_else(bad)?;
            let i: usize = exp.trim().parse().map_err(|_| bad())?;
            let (poly, after) = after.split_once(')').ok_or_else(bad)?;
            let p: Gf2Poly = poly.parse().map_err(|_| bad())?;
            if coeffs.len() <= i {
                coeffs.resize(i + 1, Gf2Poly::zero());
            }
            coeffs[i] = &coeffs[i] + &p;
            rest = after.trim_start();
            if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(bad());
                }
            } else if !rest.is_empty() {
                return Err(bad());
            }
        }
        let rel = AlgRelation::new(coeffs, 0);
        if rel.is_zero() {
            return Err(bad());
        }
        let degz = rel.degz();
        Ok(AlgRelation { degz_bound: degz, ..rel })
    }
}

/// Precision `find_relation` requires:
/// `(degX+1)(degZ+1) + degX^2 max(0, -val phi) + 32`.
pub fn required_precision(degx: usize, degz: usize, val: i64) -> i64 {
    ((degx + 1) * (degz + 1)) as i64 + (degx * degx) as i64 * (-val).max(0) + 32
}

/// Valuation of `sum p_i phi^i` at the precision of `phi`.
pub fn verify_relation(rel: &AlgRelation, phi: &LaurentSeries) -> Valuation {
    let mut acc = LaurentSeries::zero(phi.prec());
    for p in rel.coeffs.iter().rev() {
        acc = acc.mul(phi).add(&LaurentSeries::from_poly(p));
    }
    acc.valuation()
}

/// `phi^0 .. phi^degx`.
fn powers(phi: &LaurentSeries, degx: usize) -> Vec<LaurentSeries> {
    let mut out = vec![LaurentSeries::one()];
    for i in 1..=degx {
        let next = out[i - 1].mul(phi);
        out.push(next);
    }
    out
}

/// Kernel of the system for `X`-degree `d` and coefficient degree `degz`,
/// unknown `(i, e)` (coefficient of `z^e` in `p_i`) at column `i (degz+1) + e`.
fn relation_kernel(pw: &[LaurentSeries], d: usize, degz: usize, exec: Exec) -> Vec<Vec<u64>> {
    let pw = &pw[..=d];
    let usable = pw.iter().map(|p| p.prec()).min().expect("phi^0") - degz as i64;
    let low = pw.iter().map(|p| p.val_or_prec()).min().expect("phi^0").min(0) - degz as i64;
    if usable <= low {
        return Vec::new();
    }
    let width = degz + 1;
    let mut m = BitMatrix::new((d + 1) * width);
    for _ in low..usable {
        m.push_zero_row();
    }
    for (i, p) in pw.iter().enumerate() {
        // z^e phi^i has coefficient 1 at z^-(t - e) for every term z^-t of phi^i.
        for t in p.terms() {
            for e in 0..width {
                let n = t - e as i64;
                if n >= low && n < usable {
                    m.flip((n - low) as usize, i * width + e);
                }
            }
        }
    }
    m.kernel(exec)
}

fn relation_from_bits(v: &[u64], d: usize, degz: usize) -> AlgRelation {
    let width = degz + 1;
    let coeffs = (0..=d)
        .map(|i| {
            Gf2Poly::from_exponents((0..width).filter(|&e| {
                let c = i * width + e;
                v[c / 64] >> (c % 64) & 1 == 1
            }))
        })
        .collect();
    AlgRelation::new(coeffs, degz)
}

/// The relation of least `X`-degree `<= degx`, then least coefficient
/// degree `<= degz`, annihilating `phi` to its precision; `None` when the
/// kernel is trivial.
pub fn find_relation(phi: &LaurentSeries, degx: usize, degz: usize) -> Result<Option<AlgRelation>, AlgError> {
    find_relation_with(phi, degx, degz, Exec::default())
}

pub fn find_relation_with(
    phi: &LaurentSeries,
    degx: usize,
    degz: usize,
    exec: Exec,
) -> Result<Option<AlgRelation>, AlgError> {
    if degx == 0 {
        return Err(AlgError::ZeroDegree);
    }
    let required = required_precision(degx, degz, phi.val_or_prec().min(phi.prec()));
    if phi.prec() < required {
        return Err(AlgError::Precision { required, available: phi.prec(), degx, degz });
    }
    let pw = powers(phi, degx);
    for d in 1..=degx {
        if relation_kernel(&pw, d, degz, exec).is_empty() {
            continue;
        }
        // A kernel at coefficient degree z persists at z + 1, so the least
        // workable degree is found by bisection.
        let (mut lo, mut hi) = (0usize, degz);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if relation_kernel(&pw, d, mid, exec).is_empty() {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let best = relation_kernel(&pw, d, lo, exec)
            .iter()
            .map(|v| relation_from_bits(v, d, lo))
            .filter(|r| !r.is_zero())
            .min_by_key(|r| (r.degx(), r.degz(), r.coeffs.iter().map(|p| p.exponents().count()).sum::<usize>()))
            .map(|r| AlgRelation { degz_bound: degz, ..r });
        if let Some(mut rel) = best {
            rel.verified_prec = verify_relation(&rel, phi).at_least();
            return Ok(Some(rel));
        }
    }
    Ok(None)
}

/// Outcome of a bounded search with the re-verification gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub relation: Option<AlgRelation>,
    /// Residual of the accepted relation on the high-precision series.
    pub residual: Option<Valuation>,
    /// Discovery precision.
    pub prec: i64,
    /// Precision of the re-verification series.
    pub verify_prec: i64,
    /// One line per coefficient degree bound tried.
    pub log: Vec<String>,
    /// Largest coefficient degree bound actually searched.
    pub degz_searched: usize,
    pub degx: usize,
}

impl SearchOutcome {
    pub fn degree(&self) -> Option<usize> {
        self.relation.as_ref().map(AlgRelation::degx)
    }

    /// The report line of the accepted relation, or the "none" line.
    pub fn summary(&self) -> String {
        match (&self.relation, self.residual) {
            (Some(rel), Some(res)) => rel.report_line(res, self.verify_prec),
            _ if self.degz_searched == 0 => {
                format!("no search ran: every degZ bound for degree {} needs more than prec {}", self.degx, self.prec)
            }
            _ => format!(
                "no relation found up to degree {}, degZ {}, prec {}",
                self.degx, self.degz_searched, self.prec
            ),
        }
    }
}

/// Starting coefficient degree bound `degX max(deg sp, 1) + 8`.
pub fn default_degz(degx: usize, max_sp_degree: usize) -> usize {
    degx * max_sp_degree.max(1) + 8
}

/// Coefficient degree bounds tried by [`search_relation`]: `degz`, `2 degz`,
/// then further doublings while the precision allows, ending with the
/// largest bound the precision allows (alone, if even `degz` is too
/// large). With no feasible bound at all the first two are returned and the
/// search logs them as skipped.
pub fn degz_schedule(degz: usize, degx: usize, prec: i64, val: i64) -> Vec<usize> {
    let feasible = |z: usize| required_precision(degx, z, val) <= prec;
    let mut out = vec![degz.max(1), 2 * degz.max(1)];
    while feasible(*out.last().expect("nonempty")) {
        let next = 2 * out.last().expect("nonempty");
        out.push(next);
    }
    let largest = (0..).take_while(|&z| feasible(z)).last();
    out.retain(|&z| feasible(z));
    match largest {
        Some(z) if out.last() != Some(&z) => out.push(z),
        None => out = vec![degz.max(1), 2 * degz.max(1)],
        _ => {}
    }
    out
}

/// Searches `phi_lo` along [`degz_schedule`] and accepts a relation only if
/// its residual on `phi_hi` reaches `1.5 prec(phi_lo)`. A bound needing
/// more precision than `phi_lo` has is logged and skipped.
pub fn search_relation(
    phi_lo: &LaurentSeries,
    phi_hi: &LaurentSeries,
    degx: usize,
    degz: usize,
    exec: Exec,
) -> Result<SearchOutcome, AlgError> {
    let prec = phi_lo.prec();
    let gate = prec + prec / 2;
    let mut out = SearchOutcome {
        relation: None,
        residual: None,
        prec,
        verify_prec: phi_hi.prec(),
        log: Vec::new(),
        degz_searched: 0,
        degx,
    };
    for bound in degz_schedule(degz, degx, prec, phi_lo.val_or_prec().min(prec)) {
        match find_relation_with(phi_lo, degx, bound, exec) {
            Err(AlgError::Precision { required, .. }) => {
                out.log.push(format!("degZ={bound} skipped: needs prec {required}"));
            }
            Err(e) => return Err(e),
            Ok(None) => {
                out.degz_searched = bound;
                out.log.push(format!("degZ={bound} none"));
            }
            Ok(Some(rel)) => {
                out.degz_searched = bound;
                let residual = verify_relation(&rel, phi_hi);
                if residual.at_least() >= gate {
                    out.log.push(format!("degZ={bound} found degree {} residual {residual}", rel.degx()));
                    out.relation = Some(rel);
                    out.residual = Some(residual);
                    return Ok(out);
                }
                out.log.push(format!("degZ={bound} discarded degree {} (residual {residual} < {gate})", rel.degx()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    #[test]
    fn rational_series_is_degree_one() {
        let phi = LaurentSeries::from_rational(&Gf2Poly::one(), &poly("z+1"), 128).unwrap();
        let rel = find_relation(&phi, 4, 4).unwrap().unwrap();
        assert_eq!(rel.coeffs, vec![Gf2Poly::one(), poly("z+1")]);
        assert!(verify_relation(&rel, &phi).is_zero());
        assert_eq!(rel.to_string(), "X^1*(z+1) + X^0*(1)");
    }

    #[test]
    fn frobenius_telescoping_series() {
        // phi = sum z^-(2^n): phi^2 + phi = z^-1, i.e. z X^2 + z X + 1
        let phi = LaurentSeries::from_terms((0..10).map(|n| 1i64 << n), 512);
        let rel = find_relation(&phi, 4, 8).unwrap().unwrap();
        assert_eq!(rel.coeffs, vec![Gf2Poly::one(), Gf2Poly::z(), Gf2Poly::z()]);
    }

    #[test]
    fn flipped_coefficient_leaves_a_small_residual() {
        let phi = LaurentSeries::from_rational(&Gf2Poly::one(), &poly("z+1"), 128).unwrap();
        let mut rel = find_relation(&phi, 2, 4).unwrap().unwrap();
        rel.coeffs[0] = &rel.coeffs[0] + &Gf2Poly::z();
        let v = verify_relation(&rel, &phi);
        assert!(!v.is_zero() && v.at_least() < 8, "{v}");
    }

    #[test]
    fn precision_precondition_is_checked() {
        let phi = LaurentSeries::from_rational(&poly("z^2"), &poly("z+1"), 64).unwrap();
        match find_relation(&phi, 8, 64) {
            Err(AlgError::Precision { required, .. }) => assert_eq!(required, 9 * 65 + 64 + 32),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn text_form_round_trips() {
        let rel: AlgRelation = "X^2*(z) + X^1*(z) + X^0*(1)".parse().unwrap();
        assert_eq!(rel.coeffs, vec![Gf2Poly::one(), Gf2Poly::z(), Gf2Poly::z()]);
        assert_eq!(rel.to_string().parse::<AlgRelation>().unwrap(), rel);
        assert!("X^2*(z) +".parse::<AlgRelation>().is_err());
        assert!("z".parse::<AlgRelation>().is_err());
    }

    #[test]
    fn schedule_doubles_while_feasible() {
        // degX 4, val -1: required = 5 (z+1) + 16 + 32, so z <= 91 at prec 512
        assert_eq!(degz_schedule(12, 4, 512, -1), vec![12, 24, 48, 91]);
        // degX 16: z <= 12, below the starting bound
        assert_eq!(degz_schedule(24, 16, 512, -1), vec![12]);
        assert_eq!(degz_schedule(24, 16, 100, -1), vec![24, 48]);
        assert_eq!(degz_schedule(8, 2, 4096, 0).last(), Some(&1353));
    }

    #[test]
    fn content_is_removed() {
        let rel = AlgRelation::new(vec![poly("z^2+z"), poly("z")], 4);
        assert_eq!(rel.coeffs, vec![poly("z+1"), Gf2Poly::one()]);
    }
}
