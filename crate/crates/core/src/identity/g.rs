//! Identities of the `G` tower over generic `m_0`, `w_0`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cfmat::{g_quantities, g_tower_word, CfError, GQuantities, GTowerState, Mat2};
use crate::field::{CharTwoField, Gf2mElem};
use crate::seqgen::Word;

use super::{inv, rand_mat, run_identity, CheckConfig, IdentityReport};

type M = Mat2<Gf2mElem>;

fn bits_text(s: &[u8]) -> String {
    Word::from_bits(s).to_string()
}

fn draw_pair(rng: &mut ChaCha8Rng, m: u32) -> (M, M) {
    (rand_mat(rng, m), rand_mat(rng, m))
}

fn minv(x: &M) -> Result<M, CfError> {
    x.inv().map_err(|_| CfError::Degenerate("matrix"))
}

/// Basic quantities of a random `(m_1, w_1)`.
struct Basic {
    m1: M,
    w1: M,
    d: Gf2mElem,
    r: Gf2mElem,
    co: M,
}

fn basic(rng: &mut ChaCha8Rng, m: u32) -> Basic {
    let (m0, w0) = draw_pair(rng, m);
    let (m1, w1) = g_tower_word(&m0, &w0, &[]);
    let d = m1.det();
    let r = m1.trace();
    let co = m1.add(&w1).add_scalar(&r);
    Basic { m1, w1, d, r, co }
}

/// The identity list for `m_1 = w_0 m_0`, `w_1 = m_0 w_0`, plus
/// `tr(co) = 0` and `tr(c_j) = 0`.
pub fn check_g_basic_identities(cfg: &CheckConfig) -> Vec<IdentityReport> {
    type Check = fn(&Basic, u32) -> bool;
    let checks: Vec<(&str, Check)> = vec![
        ("g.basic.det", |b, k| b.m1.det() == b.w1.det().pow(1 + k as u128)),
        ("g.basic.tr", |b, k| b.m1.trace() == b.w1.trace().pow(1 + k as u128)),
        ("g.basic.co2", |b, k| {
            let m11 = b.w1.mul(&b.m1);
            b.co.square() == Mat2::scalar(m11.trace().pow(1 + k as u128))
        }),
        ("g.basic.co_m_sym", |b, k| {
            let rhs = b.co.mul(&b.co.add_scalar(&b.r).frobenius(k));
            b.co.mul(&b.m1).add(&b.m1.mul(&b.co)) == rhs
        }),
        ("g.basic.co_w_sym", |b, k| {
            let rhs = b.co.mul(&b.co.add_scalar(&b.r).frobenius(k));
            b.co.mul(&b.w1).add(&b.w1.mul(&b.co)) == rhs
        }),
        ("g.basic.co_m", |b, k| b.co.mul(&b.m1) == b.w1.frobenius(k).mul(&b.co)),
        ("g.basic.co_w", |b, k| b.co.mul(&b.w1) == b.m1.frobenius(k).mul(&b.co)),
        ("g.basic.m_sq", |b, k| b.m1.square() == b.m1.scale(&b.r.frobenius(k)).add_scalar(&b.d)),
        ("g.basic.w_sq", |b, k| b.w1.square() == b.w1.scale(&b.r.frobenius(k)).add_scalar(&b.d)),
        ("g.basic.wm", |b, k| b.w1.mul(&b.m1) == b.w1.mul(&b.co).add_scalar(&b.d.frobenius(k))),
        ("g.basic.mw", |b, k| b.m1.mul(&b.w1) == b.m1.mul(&b.co).add_scalar(&b.d.frobenius(k))),
        ("g.basic.tr_co", |b, k| {
            let x = if k == 0 { b.co.clone() } else { b.co.mul(&b.m1) };
            x.trace().is_zero()
        }),
    ];
    let m = cfg.m;
    let bump = cfg.bump();
    let mut out: Vec<IdentityReport> = checks
        .into_iter()
        .map(|(id, check)| run_identity(id, cfg, 16, move |rng| Ok(check(&basic(rng, m), bump))))
        .collect();
    out.push(run_identity("g.basic.tr_cj", cfg, 1 << 12, move |rng| {
        let b = basic(rng, m);
        let s: Vec<u8> = (0..6).map(|_| rng.gen_range(0..2u8)).collect();
        let q = g_quantities(&b.m1, &b.w1, &s)?;
        Ok(q.c.iter().all(|c| {
            let x = if bump == 0 { c.clone() } else { c.mul(&b.m1) };
            x.trace().is_zero()
        }))
    }));
    out
}

/// Degree of the closed form for `|s| = k` as a polynomial identity in the
/// eight entries of `m_0`, `w_0` after clearing denominators.
fn prop_degree(k: usize) -> u64 {
    1u64 << (k + 4).min(62)
}

/// `m_{1s}` and `w_{1s}` by the recurrence against the closed forms
/// `(m_1 + c_1 + ... + c_k) d^(2^(k-1)) / c_k` (roles of `m_1`, `w_1`
/// swapped when `t(s) = 1`), right-multiplied as displayed.
pub fn check_prop_main(s: &[u8], cfg: &CheckConfig) -> IdentityReport {
    let m = cfg.m;
    let bump = cfg.bump() as u128;
    let s = s.to_vec();
    let id = format!("g.prop_main[{}]", bits_text(&s));
    run_identity(&id, cfg, prop_degree(s.len()), move |rng| {
        let (m0, w0) = draw_pair(rng, m);
        let (m1, w1) = g_tower_word(&m0, &w0, &[]);
        let q = g_quantities(&m1, &w1, &s)?;
        let (mut cm, mut cw) = q.closed_form()?;
        if bump > 0 {
            cm = cm.scale(&q.d.pow(bump));
            cw = cw.scale(&q.d.pow(bump));
        }
        let (rm, rw) = g_tower_word(&m0, &w0, &s);
        Ok(cm == rm && cw == rw)
    })
}

/// Every binary word of length `len`.
fn all_words(len: usize) -> Vec<Vec<u8>> {
    (0..1u32 << len).map(|x| (0..len).map(|i| (x >> (len - 1 - i) & 1) as u8).collect()).collect()
}

/// [`check_prop_main`] for every `s` with `1 <= |s| <= max_len`, one merged
/// report per length.
pub fn check_prop_main_all(max_len: usize, cfg: &CheckConfig) -> Vec<IdentityReport> {
    (1..=max_len)
        .map(|k| {
            let parts: Vec<IdentityReport> = all_words(k).iter().map(|s| check_prop_main(s, cfg)).collect();
            IdentityReport::merge(&format!("g.prop_main[|s|={k}]"), &parts)
        })
        .collect()
}

/// The recurrences behind the closed form, for a random `s` of length
/// `1..=max_len` per trial, with `delta_j = t(s(j))`:
///
/// * `c_1 = delta_1 d/co + (1 - delta_1) d/r` and
///   `c_{j+1} = c_j^2 (delta_{j+1}/co + (1 - delta_{j+1})/r)`;
/// * `d/co + c_1 (1-delta_1)(1 + r/co) = c_1`,
///   `c_j^2/co + c_{j+1} (1-delta_{j+1})(1 + r/co) = c_{j+1}`;
/// * `d/r + c_1 delta_1 (co/r + 1) = c_1`,
///   `c_j^2/r + c_{j+1} delta_{j+1} (co/r + 1) = c_{j+1}`.
pub fn check_prop_aux(max_len: usize, cfg: &CheckConfig) -> IdentityReport {
    let m = cfg.m;
    let bump = cfg.bump();
    run_identity("g.prop_aux", cfg, prop_degree(max_len), move |rng| {
        let b = basic(rng, m);
        let k = rng.gen_range(1..=max_len);
        let s: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2u8)).collect();
        let q = g_quantities(&b.m1, &b.w1, &s)?;
        let co_inv = minv(&q.co)?;
        let r_inv = inv(&q.r)?;
        let one = Mat2::identity(&q.d);
        let zero = Mat2::zero(&q.d);
        let delta = crate::seqgen::word_stats(&Word::from_bits(&s))?.delta;
        let pick = |flag: bool, x: &M| if flag { x.clone() } else { zero.clone() };
        // 1 + r/co and co/r + 1
        let a = one.add(&co_inv.scale(&q.r));
        let bb = q.co.scale(&r_inv).add(&one);
        let d = Mat2::scalar(q.d);
        for j in 0..k {
            let dj = delta[j] == 1;
            let prev = if j == 0 { d.clone() } else { q.c(j).frobenius(1 + bump) };
            let cj1 = q.c(j + 1);
            let rec = prev.mul(&if dj { co_inv.clone() } else { Mat2::scalar(r_inv) });
            let via_co = prev.mul(&co_inv).add(&pick(!dj, &cj1.mul(&a)));
            let via_r = prev.scale(&r_inv).add(&pick(dj, &cj1.mul(&bb)));
            if rec != *cj1 || via_co != *cj1 || via_r != *cj1 {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// The relations of the two worked examples, built with the examples' own
/// recurrences and literal formulas (`/co` as multiplication by `co^-1`).
pub fn check_examples(cfg: &CheckConfig) -> Vec<IdentityReport> {
    let m = cfg.m;
    let bump = cfg.bump() as u128;

    struct Ex {
        ms: Vec<M>,
        ws: Vec<M>,
        d: Gf2mElem,
        r: Gf2mElem,
        co_inv: M,
        l: Gf2mElem,
    }
    // step(i) = true: m_{i+1} = w_i m_i, w_{i+1} = m_i w_i; false: squares.
    fn run(rng: &mut ChaCha8Rng, m: u32, steps: &[bool], l_co_exp: u128) -> Result<Ex, CfError> {
        let (m0, w0) = draw_pair(rng, m);
        let (mut ms, mut ws) = (vec![m0], vec![w0]);
        for &interleave in steps {
            let (a, b) = (ms.last().expect("m0").clone(), ws.last().expect("w0").clone());
            if interleave {
                ms.push(b.mul(&a));
                ws.push(a.mul(&b));
            } else {
                ms.push(a.square());
                ws.push(b.square());
            }
        }
        let d = ms[1].det();
        let r = ms[1].trace();
        let co = ms[1].add(&ws[1]).add_scalar(&r);
        let co2 = co.square();
        let l = co2.e00.pow(l_co_exp / 2).mul(&r);
        if !co2.is_scalar() {
            return Ok(Ex { ms, ws, d, r, co_inv: co, l: Gf2mElem::zero(m).expect("m") });
        }
        Ok(Ex { co_inv: minv(&co)?, ms, ws, d, r, l })
    }
    let pw = |x: &M, e: u32| -> M {
        let mut acc = Mat2::identity(&x.e00);
        for _ in 0..e {
            acc = acc.mul(x);
        }
        acc
    };

    let ex1 = move |rng: &mut ChaCha8Rng| run(rng, m, &[true; 7], 2);
    let ex2 = move |rng: &mut ChaCha8Rng| run(rng, m, &[true, true, false, true, true, false, true], 6);

    vec![
        // m_3 = (m_1 + d/co + d^2/r/co^2) l, l = r co^2
        run_identity("g.example1.star", cfg, 64, move |rng| {
            let e = ex1(rng)?;
            let ri = inv(&e.r)?;
            let inner = e.ms[1]
                .add(&e.co_inv.scale(&e.d))
                .add(&pw(&e.co_inv, 2).scale(&e.d.pow(2 + bump).mul(&ri)));
            Ok(inner.scale(&e.l) == e.ms[3])
        }),
        // primes from m_0' = m_2: d' = d^4, r' = r l, co' = co l, l' = l^4
        run_identity("g.example1.primes", cfg, 128, move |rng| {
            let e = ex1(rng)?;
            let (m1p, w1p) = (e.ws[2].mul(&e.ms[2]), e.ms[2].mul(&e.ws[2]));
            let dp = m1p.det();
            let rp = m1p.trace();
            let cop = m1p.add(&w1p).add_scalar(&rp);
            let lp = cop.square().e00.mul(&rp);
            let co = minv(&e.co_inv)?;
            Ok(dp == e.d.pow(4 + bump) && rp == e.r.mul(&e.l) && cop == co.scale(&e.l) && lp == e.l.pow(4))
        }),
        // m_5 = l^(1+4) (m_1 + (d + d^4/l^2)/co + (d^2 + d^8/l^4)/r/co^2)
        run_identity("g.example1.m5", cfg, 256, move |rng| {
            let e = ex1(rng)?;
            let (ri, li) = (inv(&e.r)?, inv(&e.l)?);
            let h1 = e.d.add(&e.d.pow(4).mul(&li.pow(2 + bump)));
            let h2 = e.d.pow(2).add(&e.d.pow(8).mul(&li.pow(4))).mul(&ri);
            let inner = e.ms[1].add(&e.co_inv.scale(&h1)).add(&pw(&e.co_inv, 2).scale(&h2));
            Ok(inner.scale(&e.l.pow(5)) == e.ms[5])
        }),
        // m_4 = (m_1 + d/co + d^2/co^3 + d^4/r/co^6) l, l = r co^6
        run_identity("g.example2.diamond", cfg, 256, move |rng| {
            let e = ex2(rng)?;
            let ri = inv(&e.r)?;
            let inner = e.ms[1]
                .add(&e.co_inv.scale(&e.d))
                .add(&pw(&e.co_inv, 3).scale(&e.d.pow(2 + bump)))
                .add(&pw(&e.co_inv, 6).scale(&e.d.pow(4).mul(&ri)));
            Ok(inner.scale(&e.l) == e.ms[4])
        }),
        // primes from m_0' = m_3: d' = d^8, r' = r l, co' = co l, l' = l^8
        run_identity("g.example2.primes", cfg, 512, move |rng| {
            let e = ex2(rng)?;
            let (m1p, w1p) = (e.ws[3].mul(&e.ms[3]), e.ms[3].mul(&e.ws[3]));
            let dp = m1p.det();
            let rp = m1p.trace();
            let cop = m1p.add(&w1p).add_scalar(&rp);
            let lp = cop.square().e00.pow(3).mul(&rp);
            let co = minv(&e.co_inv)?;
            Ok(dp == e.d.pow(8 + bump) && rp == e.r.mul(&e.l) && cop == co.scale(&e.l) && lp == e.l.pow(8))
        }),
        // m_7 = l^(1+8) (m_1 + (d + d^8/l^2)/co + (d^2 + d^16/l^4)/co^3 + (d^4 + d^32/l^8)/r/co^6)
        run_identity("g.example2.m7", cfg, 2048, move |rng| {
            let e = ex2(rng)?;
            let (ri, li) = (inv(&e.r)?, inv(&e.l)?);
            let h1 = e.d.add(&e.d.pow(8).mul(&li.pow(2)));
            let h2 = e.d.pow(2).add(&e.d.pow(16).mul(&li.pow(4 + bump)));
            let h3 = e.d.pow(4).add(&e.d.pow(32).mul(&li.pow(8))).mul(&ri);
            let inner = e.ms[1]
                .add(&e.co_inv.scale(&h1))
                .add(&pw(&e.co_inv, 3).scale(&h2))
                .add(&pw(&e.co_inv, 6).scale(&h3));
            Ok(inner.scale(&e.l.pow(9)) == e.ms[7])
        }),
    ]
}

/// Every `s` with `2 <= |s| <= max_len` that ends in 1 and has an even
/// number of 1's.
pub fn tower_words(max_len: usize) -> Vec<Vec<u8>> {
    (2..=max_len)
        .flat_map(all_words)
        .filter(|s| crate::cfmat::check_period_word(s).is_ok())
        .collect()
}

fn generations(rng: &mut ChaCha8Rng, m: u32, s: &[u8], gens: usize) -> Result<(M, M, Vec<GTowerState<Gf2mElem>>), CfError> {
    let (m0, w0) = draw_pair(rng, m);
    let mut out = vec![GTowerState::new(&m0, &w0, s)?];
    for _ in 0..gens {
        let next = out.last().expect("gen 0").advance()?;
        out.push(next);
    }
    Ok((m0, w0, out))
}

fn c_over_l(q: &GQuantities<Gf2mElem>, j: usize, big_l: &Gf2mElem) -> Result<M, CfError> {
    Ok(q.c(j).scale(&inv(big_l)?))
}

/// The primed relations and the three lemmas on the generations
/// `q = 0..=gens` of the tower of `s`. `s` must end with 1 and contain an
/// even number of 1's.
pub fn check_tower_relations(s: &[u8], gens: usize, cfg: &CheckConfig) -> Result<Vec<IdentityReport>, CfError> {
    crate::cfmat::check_period_word(s)?;
    let m = cfg.m;
    let bump = cfg.bump();
    let k = s.len();
    let tag = bits_text(s);
    let degree = 1u64 << ((gens + 1) * k + 4).min(62);
    let s = s.to_vec();
    let pk = 1u128 << k;

    let mut out = Vec::new();
    let s1 = s.clone();
    out.push(run_identity(&format!("g.primed.d[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens)?;
        Ok(g.windows(2).all(|p| p[1].q.d == p[0].q.d.frobenius(k as u32 + bump)))
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.primed.r[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens)?;
        Ok(g.windows(2).all(|p| p[1].q.r == p[0].l().pow(1 + bump as u128).mul(&p[0].q.r)))
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.primed.co[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens)?;
        Ok(g.windows(2).all(|p| p[1].q.co == p[0].q.co.scale(&p[0].l().pow(1 + bump as u128))))
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.primed.l[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens)?;
        Ok(g.iter().all(|x| x.q.l.is_scalar()) && g.windows(2).all(|p| p[1].l() == p[0].l().pow(pk + bump as u128)))
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.primed.c[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens)?;
        for p in g.windows(2) {
            let (a, b) = (&p[0].q, &p[1].q);
            let li = inv(&p[0].l())?;
            for j in 1..=k {
                let f = a.d.pow((pk - 1) << (j - 1)).mul(&li.pow((1u128 << j) - 1 + bump as u128));
                if *b.c(j) != a.c(j).scale(&f) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.primed.L[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens)?;
        let l = g[0].l();
        Ok(g.windows(2).all(|p| p[1].big_l == p[0].big_l.pow(pk + bump as u128).mul(&l)))
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.l_def[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, 0)?;
        let q = &g[0].q;
        let l = minv(q.c(k))?.scale(&q.d.frobenius(k as u32 - 1 + bump));
        Ok(l.is_scalar() && l == q.l)
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.lemma32[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens)?;
        let base = &g[0].q;
        for j in 2..=k {
            let e = j as u32 - 1;
            let want = base.c(j).mul(&minv(&base.c(1).frobenius(e))?);
            for x in &g {
                let num = c_over_l(&x.q, j, &x.big_l)?;
                let den = c_over_l(&x.q, 1, &x.big_l)?.frobenius(e + bump);
                if num.mul(&minv(&den)?) != want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.lemma33[{tag}]"), cfg, degree, move |rng| {
        let (_, _, g) = generations(rng, m, &s1, gens.max(1))?;
        let l = g[0].l();
        let want = g[1].q.c(1).scale(&inv(&l)?).mul(&minv(&g[0].q.c(1).frobenius(k as u32))?);
        for p in g.windows(2) {
            let num = c_over_l(&p[1].q, 1, &p[1].big_l)?;
            let den = c_over_l(&p[0].q, 1, &p[0].big_l)?.frobenius(k as u32 + bump);
            if num.mul(&minv(&den)?) != want {
                return Ok(false);
            }
        }
        Ok(true)
    }));
    let s1 = s.clone();
    out.push(run_identity(&format!("g.lemma34[{tag}]"), cfg, degree, move |rng| {
        let (m0, w0, g) = generations(rng, m, &s1, gens)?;
        let mut sum = g[0].q.m1.clone();
        for i in 1..=gens {
            let x = &g[i - 1];
            for j in 1..=k {
                sum = sum.add(&c_over_l(&x.q, j, &x.big_l)?);
            }
            let word: Vec<u8> = s1.repeat(i);
            let (direct, _) = g_tower_word(&m0, &w0, &word);
            if sum.scale(&g[i].big_l.pow(1 + bump as u128)) != direct {
                return Ok(false);
            }
        }
        Ok(true)
    }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::Status;

    fn small() -> CheckConfig {
        CheckConfig { trials: 10, ..CheckConfig::default() }
    }

    fn all_pass(reports: &[IdentityReport]) {
        for r in reports {
            assert_eq!(r.status, Status::Pass, "{}", r.detail());
        }
    }

    fn all_fail(reports: &[IdentityReport]) {
        for r in reports {
            assert_eq!(r.status, Status::Fail, "{}", r.detail());
        }
    }

    #[test]
    fn basic_list() {
        all_pass(&check_g_basic_identities(&small()));
        all_fail(&check_g_basic_identities(&small().mutated()));
    }

    #[test]
    fn closed_form_short_words() {
        all_pass(&check_prop_main_all(4, &small()));
        all_fail(&check_prop_main_all(2, &small().mutated()));
    }

    #[test]
    fn recurrences_of_the_correction_terms() {
        all_pass(&[check_prop_aux(6, &small())]);
        all_fail(&[check_prop_aux(6, &small().mutated())]);
    }

    #[test]
    fn worked_examples() {
        all_pass(&check_examples(&small()));
        all_fail(&check_examples(&small().mutated()));
    }

    #[test]
    fn tower_relations_thue_morse_and_example_two() {
        for s in [&[1u8, 1][..], &[1, 0, 1]] {
            all_pass(&check_tower_relations(s, 2, &small()).unwrap());
            all_fail(&check_tower_relations(s, 2, &small().mutated()).unwrap());
        }
    }

    #[test]
    fn tower_words_up_to_four() {
        let words: Vec<String> = tower_words(4).iter().map(|s| bits_text(s)).collect();
        assert_eq!(words, ["11", "011", "101", "0011", "0101", "1001", "1111"]);
        assert!(check_tower_relations(&[1, 0], 1, &small()).is_err());
    }
}
