//! Acceptance run: one `criterion N pass|FAIL ...` line per criterion.
//!
//! Criteria listed in `UNATTAINABLE` are run in full and reported, but do
//! not fail the test run; everything else must pass.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cf2::algrel::{
    check_corollary, check_theorem1, check_theorem2, explore_sigma_inv, ExploreOutcome, TheoremReport,
};
use cf2::cfmat::SpecializationMap;
use cf2::identity::{
    check_examples, check_valuation_bounds_g, check_valuation_bounds_p, standard_suite, CheckConfig, Status,
    FACT_D_BOUND, FACT_G_L, FACT_P_L,
};
use cf2::par::Exec;
use cf2::seqgen::{g_prefix, g_sigma, p_prefix, p_to_g, sigma_word, GSpec, PSpec, Word};

/// Criteria that cannot hold as stated:
/// 6: s = "1001" needs 561 unknowns at degX 16 but prec 512 gives at most
///    512 coefficient equations.
/// 8: d_0 = 1 and val(d_j) = 2^(j+1) - 2 for the period-doubling word, below
///    2^(2j) from j = 0 on.
/// 9: degX 8, degZ 64 needs prec 681.
const UNATTAINABLE: &[u32] = &[6, 8, 9];

/// Writes past the test harness's output capture, so the criterion lines
/// show up in a plain `cargo test` run.
macro_rules! say {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*).expect("stdout")
    };
}

struct Outcome {
    n: u32,
    pass: bool,
    detail: String,
}

fn report(n: u32, pass: bool, detail: String) -> Outcome {
    say!("criterion {n} {} {detail}", if pass { "pass" } else { "FAIL" });
    Outcome { n, pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn pspec(w0: &str, eps: &str) -> PSpec {
    PSpec::new(w0.parse().unwrap(), eps.parse().unwrap()).unwrap()
}

fn gspec(u0: &str, v0: &str, ups: &str) -> GSpec {
    GSpec::new(u0.parse().unwrap(), v0.parse().unwrap(), ups.parse().unwrap()).unwrap()
}

fn bits(rng: &mut ChaCha8Rng, len: usize) -> Word {
    Word::from_bits(&(0..len).map(|_| rng.gen_range(0..2u8)).collect::<Vec<_>>())
}

fn sequence_goldens() -> Outcome {
    let n = 1 << 14;
    let start = Instant::now();
    let p = p_prefix(&pspec("", "10"), n);
    let t = g_prefix(&gspec("0", "1", "1"), n);
    let sp = sigma_word(&p).unwrap();
    let elapsed = start.elapsed();
    // Independent oracles: p_n = 1 - (v2(n+1) mod 2), t_n = popcount(n) mod 2.
    let p_ok = p.letters().iter().enumerate().all(|(i, &c)| c == (b'1' - ((i + 1).trailing_zeros() % 2) as u8));
    let t_ok = t.letters().iter().enumerate().all(|(i, &c)| c == (b'0' + (i.count_ones() % 2) as u8));
    let sigma_ok = sp.prefix(n) == t;
    let pass = p_ok && t_ok && sigma_ok && elapsed < Duration::from_secs(1);
    report(1, pass, format!("len={n} p={p_ok} t={t_ok} sigma(p)=t={sigma_ok} time={}", secs(elapsed)))
}

fn oracle_equivalence() -> Outcome {
    let n = 1 << 14;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut p_bad = 0;
    for _ in 0..20 {
        let w0 = rng.gen_range(0..=4);
        let eps = rng.gen_range(1..=4);
        let spec = PSpec::new(bits(&mut rng, w0), bits(&mut rng, eps)).unwrap();
        let lhs = sigma_word(&p_prefix(&spec, n)).unwrap().prefix(n);
        if lhs != g_prefix(&p_to_g(&spec).unwrap(), n) {
            p_bad += 1;
        }
    }
    let mut g_bad = 0;
    for _ in 0..20 {
        let len = rng.gen_range(1..=4);
        let ups = rng.gen_range(1..=4);
        let spec = GSpec::new(bits(&mut rng, len), bits(&mut rng, len), bits(&mut rng, ups)).unwrap();
        let lhs = sigma_word(&g_prefix(&spec, n)).unwrap().prefix(n);
        if lhs != g_prefix(&g_sigma(&spec).unwrap(), n) {
            g_bad += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = p_bad == 0 && g_bad == 0 && elapsed < Duration::from_secs(10);
    report(2, pass, format!("len={n} p_mismatch={p_bad}/20 g_mismatch={g_bad}/20 time={}", secs(elapsed)))
}

fn identity_suite() -> Outcome {
    let cfg = CheckConfig { trials: 100, m: 16, seed: 1, ..CheckConfig::default() };
    let start = Instant::now();
    let plain = standard_suite(&cfg);
    let mutated = standard_suite(&cfg.mutated());
    let elapsed = start.elapsed();
    let failed: Vec<&str> = plain.iter().filter(|r| r.status != Status::Pass).map(|r| r.id.as_str()).collect();
    let survived: Vec<&str> = mutated.iter().filter(|r| r.status != Status::Fail).map(|r| r.id.as_str()).collect();
    for id in failed.iter().chain(&survived) {
        say!("  offending {id}");
    }
    let pass = failed.is_empty() && survived.is_empty() && elapsed < Duration::from_secs(60);
    report(
        3,
        pass,
        format!(
            "identities={} failures={} mutants_caught={}/{} time={}",
            plain.len(),
            failed.len(),
            mutated.len() - survived.len(),
            mutated.len(),
            secs(elapsed)
        ),
    )
}

fn worked_examples(sp: &SpecializationMap) -> Outcome {
    let cfg = CheckConfig::default();
    let instances = check_examples(&cfg);
    let mut ok = instances.iter().all(|r| r.status == Status::Pass);
    let mut parts = vec![format!("instances={}/{}", instances.iter().filter(|r| r.status == Status::Pass).count(), instances.len())];
    for (name, ups) in [("example1", "1"), ("example2", "011")] {
        let r = check_theorem2(&gspec("0", "1", ups), sp, 256, Exec::default()).unwrap();
        for eq in ["H^(2^k)/l^2=H+d", "f^(2^k)*l=f"] {
            let c = r.check(eq).expect("equation checked");
            let holds = c.residual.at_least() >= 224;
            ok &= holds;
            parts.push(format!("{name}:{eq}:{}", c.residual));
        }
    }
    report(4, ok, parts.join(" "))
}

fn relation_detail(r: &TheoremReport) -> String {
    let degree = r.degree().map_or("none".into(), |d| d.to_string());
    let residual = r.search.residual.map_or("none".into(), |v| v.to_string());
    format!("degree={degree}<={} residual={residual}@{}", r.degree_bound, r.search.verify_prec)
}

/// Relation found within the bound and re-verified at `2 * prec` to
/// valuation `1.5 * prec`.
fn relation_ok(r: &TheoremReport) -> bool {
    r.degree().is_some_and(|d| d <= r.degree_bound)
        && r.search.verify_prec == 2 * r.prec
        && r.search.residual.is_some_and(|v| v.at_least() >= r.prec + r.prec / 2)
}

fn theorem1_desk() -> Outcome {
    let sp = SpecializationMap::default_binary();
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for eps in ["1", "10", "100"] {
        let r = check_theorem1(&pspec("", eps), &sp, 512, Exec::default()).unwrap();
        ok &= relation_ok(&r) && r.degree_bound == 1 << eps.len();
        parts.push(format!("eps={eps}:{}", relation_detail(&r)));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    parts.push(format!("time={}", secs(elapsed)));
    report(5, ok, parts.join(" "))
}

fn theorem2_desk(sp: &SpecializationMap) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    // Normalized periods s = "11", "101", "1001".
    for ups in ["11", "011", "1100"] {
        let r = check_theorem2(&gspec("0", "1", ups), sp, 512, Exec::default()).unwrap();
        let holds = relation_ok(&r) && r.checks_hold();
        ok &= holds;
        parts.push(format!("ups={ups}:{}", relation_detail(&r)));
        if !holds {
            let hi = check_theorem2(&gspec("0", "1", ups), sp, 1200, Exec::default()).unwrap();
            say!("  supplementary ups={ups} prec=1200 {} {}", hi.status(), relation_detail(&hi));
        }
    }
    let tm = check_theorem2(&gspec("0", "1", "1"), sp, 512, Exec::default()).unwrap();
    ok &= relation_ok(&tm) && tm.degree().is_some_and(|d| d <= 4);
    parts.push(format!("thue-morse:{}", relation_detail(&tm)));
    report(6, ok, parts.join(" "))
}

fn corollary_chain(sp: &SpecializationMap) -> Outcome {
    let spec = pspec("", "10");
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=3 {
        let r = check_corollary(&spec, sp, k, 512, Exec::default()).unwrap();
        let degree_ok = r.theorem.degree().is_some_and(|d| d <= 4);
        let oracle_ok = r.oracle.residual.at_least() >= 256;
        ok &= degree_ok && oracle_ok && relation_ok(&r.theorem);
        parts.push(format!("k={k}:{} oracle={}", relation_detail(&r.theorem), r.oracle.residual));
    }
    report(7, ok, parts.join(" "))
}

fn valuation_suite(sp: &SpecializationMap) -> Outcome {
    let p = check_valuation_bounds_p(&pspec("", "10"), sp, 6, 512).unwrap();
    let g = check_valuation_bounds_g(&gspec("0", "1", "1"), sp, 512).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (r, fact) in [
        (&p, FACT_D_BOUND),
        (&p, FACT_P_L),
        (&g, FACT_G_L),
    ] {
        let measured: Vec<String> = r.checks.iter().filter(|c| c.fact == fact).map(|c| c.measured.to_string()).collect();
        let holds = r.fact_holds(fact);
        ok &= holds;
        parts.push(format!("{fact}:{}[{}]", if holds { "ok" } else { "violated" }, measured.join(",")));
    }
    report(8, ok, parts.join(" "))
}

fn explore_observation(sp: &SpecializationMap) -> Outcome {
    let spec = pspec("", "10");
    let r = explore_sigma_inv(&spec, sp, 8, 64, 512, Exec::default()).unwrap();
    let pass = matches!(r.outcome, ExploreOutcome::None);
    if !pass {
        let hi = explore_sigma_inv(&spec, sp, 8, 64, 1024, Exec::default()).unwrap();
        say!("  supplementary {hi}");
    }
    report(9, pass, format!("observation: {r}"))
}

#[test]
fn acceptance() {
    let sp = SpecializationMap::default_binary();
    let outcomes = [
        sequence_goldens(),
        oracle_equivalence(),
        identity_suite(),
        worked_examples(&sp),
        theorem1_desk(),
        theorem2_desk(&sp),
        corollary_chain(&sp),
        valuation_suite(&sp),
        explore_observation(&sp),
    ];
    let passed = outcomes.iter().filter(|o| o.pass).count();
    say!("acceptance {passed}/{} criteria pass", outcomes.len());
    let unexpected: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.pass && !UNATTAINABLE.contains(&o.n))
        .map(|o| format!("criterion {}: {}", o.n, o.detail))
        .collect();
    assert!(unexpected.is_empty(), "{unexpected:#?}");
}
