//! Randomized verification of the tower identities.
//!
//! Every identity is a polynomial identity in the entries of generic
//! matrices `m_0`, `w_0` (and `1/eps`), so it is tested by evaluating both
//! sides at uniform draws over GF(2^m). A mismatch is a definite
//! counterexample. A nonzero polynomial of total degree `D` vanishes at a
//! uniform point with probability at most `D / 2^m`, so `n` passing trials
//! leave a false-pass probability of at most `(D / 2^m)^n`.
//!
//! Draws that hit a non-invertible denominator are resampled, up to
//! [`CheckConfig::resample_budget`] times per trial.
//!
//! Each checker has a mutated variant (`CheckConfig::mutate`) that perturbs
//! one exponent of the identity; the mutated identity must fail.

mod g;
mod p;
mod valuation;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cfmat::{CfError, Mat2};
use crate::field::{CharTwoField, FieldError, Gf2mElem};
use crate::par::Exec;

pub use g::{
    check_examples, check_g_basic_identities, check_prop_aux, check_prop_main, check_prop_main_all,
    check_tower_relations, tower_words,
};
pub use p::{check_p_lemma1, check_p_lemma2, check_p_powers};
pub use valuation::{
    check_valuation_bounds_g, check_valuation_bounds_p, Rel, ValuationCheck, ValuationReport, FACT_D_BOUND, FACT_D_REC,
    FACT_G_CO00, FACT_G_CO11, FACT_G_D, FACT_G_L, FACT_G_R, FACT_M00, FACT_P_L,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The resampling budget ran out on some trial.
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub id: String,
    pub trials: usize,
    pub m: u32,
    pub seed: u64,
    /// Trial indices whose draw refuted the identity.
    pub failures: Vec<usize>,
    pub resamples: usize,
    pub inconclusive: usize,
    /// Degree bound `D` of the identity as a polynomial in the draws.
    pub degree_bound: u64,
    pub status: Status,
}

impl IdentityReport {
    /// `log2` of the false-pass bound `(D / 2^m)^trials`.
    pub fn false_pass_log2(&self) -> f64 {
        let per = (self.degree_bound.max(1) as f64).log2() - self.m as f64;
        per.min(0.0) * self.trials as f64
    }

    /// Combines reports of one identity family run on several inputs.
    pub fn merge(id: &str, parts: &[IdentityReport]) -> IdentityReport {
        let first = &parts[0];
        let mut failures = Vec::new();
        let mut offset = 0;
        for p in parts {
            failures.extend(p.failures.iter().map(|f| f + offset));
            offset += p.trials;
        }
        let inconclusive = parts.iter().map(|p| p.inconclusive).sum();
        IdentityReport {
            id: id.to_string(),
            trials: offset,
            m: first.m,
            seed: first.seed,
            status: status_of(&failures, inconclusive),
            failures,
            resamples: parts.iter().map(|p| p.resamples).sum(),
            inconclusive,
            degree_bound: parts.iter().map(|p| p.degree_bound).max().unwrap_or(0),
        }
    }

    /// Extra details: failures, resamples and the false-pass bound.
    pub fn detail(&self) -> String {
        format!(
            "{} failures={:?} resamples={} inconclusive={} degree_bound={} false_pass<=2^{:.0}",
            self.id,
            self.failures,
            self.resamples,
            self.inconclusive,
            self.degree_bound,
            self.false_pass_log2()
        )
    }
}

fn status_of(failures: &[usize], inconclusive: usize) -> Status {
    if !failures.is_empty() {
        Status::Fail
    } else if inconclusive > 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} trials={} field=GF(2^{}) seed={:#x}", self.id, self.status, self.trials, self.m, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub trials: usize,
    pub m: u32,
    pub seed: u64,
    pub resample_budget: usize,
    pub mutate: bool,
    pub exec: Exec,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { trials: 100, m: 16, seed: 1, resample_budget: 100, mutate: false, exec: Exec::default() }
    }
}

impl CheckConfig {
    pub fn mutated(self) -> Self {
        Self { mutate: true, ..self }
    }

    /// Exponent perturbation applied by mutated checkers.
    pub(crate) fn bump(&self) -> u32 {
        self.mutate as u32
    }
}

/// Stream seed for one draw, so that results do not depend on the order in
/// which trials run.
fn draw_seed(seed: u64, id: &str, trial: usize, attempt: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut x = seed ^ h ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((attempt as u64) << 48);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn is_degenerate(e: &CfError) -> bool {
    matches!(
        e,
        CfError::Degenerate(_)
            | CfError::ZeroPartialQuotient
            | CfError::Field(FieldError::NotInvertible)
            | CfError::Field(FieldError::ZeroDivisor)
    )
}

/// Runs `trial` `cfg.trials` times on independent draws. The closure
/// returns whether the identity held; degenerate draws are resampled.
pub fn run_identity<T>(id: &str, cfg: &CheckConfig, degree_bound: u64, trial: T) -> IdentityReport
where
    T: Fn(&mut ChaCha8Rng) -> Result<bool, CfError> + Send + Sync,
{
    enum Outcome {
        Held(usize),
        Refuted(usize),
        Exhausted(usize),
    }
    let outcomes = cfg.exec.map_range(cfg.trials, |t| {
        for attempt in 0..=cfg.resample_budget {
            let mut rng = ChaCha8Rng::seed_from_u64(draw_seed(cfg.seed, id, t, attempt));
            match trial(&mut rng) {
                Ok(true) => return Outcome::Held(attempt),
                Ok(false) => return Outcome::Refuted(attempt),
                Err(e) if is_degenerate(&e) => continue,
                Err(_) => return Outcome::Refuted(attempt),
            }
        }
        Outcome::Exhausted(cfg.resample_budget)
    });
    let mut failures = Vec::new();
    let (mut resamples, mut inconclusive) = (0, 0);
    for (t, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Held(a) => resamples += a,
            Outcome::Refuted(a) => {
                resamples += a;
                failures.push(t);
            }
            Outcome::Exhausted(a) => {
                resamples += a;
                inconclusive += 1;
            }
        }
    }
    IdentityReport {
        id: id.to_string(),
        trials: cfg.trials,
        m: cfg.m,
        seed: cfg.seed,
        status: status_of(&failures, inconclusive),
        failures,
        resamples,
        inconclusive,
        degree_bound,
    }
}

pub(crate) fn rand_elem(rng: &mut ChaCha8Rng, m: u32) -> Gf2mElem {
    Gf2mElem::sample(m, rng).expect("supported degree")
}

pub(crate) fn rand_nonzero(rng: &mut ChaCha8Rng, m: u32) -> Gf2mElem {
    Gf2mElem::sample_invertible(m, rng).expect("supported degree")
}

pub(crate) fn rand_mat(rng: &mut ChaCha8Rng, m: u32) -> Mat2<Gf2mElem> {
    Mat2::new(rand_elem(rng, m), rand_elem(rng, m), rand_elem(rng, m), rand_elem(rng, m))
}

pub(crate) fn inv(x: &Gf2mElem) -> Result<Gf2mElem, CfError> {
    Ok(x.inv()?)
}

/// The whole identity suite with the default sizes: P lemmas over 5 steps,
/// the `G` identity list, the closed form of `m_{1s}` for every `s` with
/// `|s| <= 8`,
/// the worked examples, and the tower relations for three generations.
pub fn standard_suite(cfg: &CheckConfig) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    out.push(check_p_lemma1(5, cfg));
    out.extend(check_p_lemma2(2, 3, true, cfg));
    out.extend(check_p_lemma2(3, 3, true, cfg));
    out.extend(check_p_powers(2, 3, cfg));
    out.extend(check_g_basic_identities(cfg));
    out.extend(check_prop_main_all(8, cfg));
    out.push(check_prop_aux(6, cfg));
    out.extend(check_examples(cfg));
    for s in tower_words(4) {
        out.extend(check_tower_relations(&s, 3, cfg).expect("valid tower word"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draw_seeds_are_distinct_and_stable() {
        let a = draw_seed(1, "x", 0, 0);
        assert_eq!(a, draw_seed(1, "x", 0, 0));
        assert_ne!(a, draw_seed(1, "x", 1, 0));
        assert_ne!(a, draw_seed(1, "y", 0, 0));
        assert_ne!(a, draw_seed(1, "x", 0, 1));
        assert_ne!(a, draw_seed(2, "x", 0, 0));
    }

    #[test]
    fn runner_reports_failures_and_exhaustion() {
        let cfg = CheckConfig { trials: 10, ..CheckConfig::default() };
        let r = run_identity("ok", &cfg, 1, |_| Ok(true));
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.to_string(), "ok pass trials=10 field=GF(2^16) seed=0x1");
        let r = run_identity("bad", &cfg, 1, |rng| Ok(rand_elem(rng, 16).rep() % 2 == 0));
        assert_eq!(r.status, Status::Fail);
        let r = run_identity("degenerate", &cfg, 1, |_| Err(CfError::Degenerate("r")));
        assert_eq!(r.status, Status::Inconclusive);
        assert_eq!(r.inconclusive, 10);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let seq = CheckConfig { exec: Exec::Sequential, ..CheckConfig::default() };
        let par = CheckConfig { exec: Exec::Parallel, ..CheckConfig::default() };
        assert_eq!(check_p_lemma1(4, &seq), check_p_lemma1(4, &par));
    }
}
