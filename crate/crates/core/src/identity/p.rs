//! Identities of the `P` tower over generic `m_0` and `eps`.

use rand_chacha::ChaCha8Rng;

use crate::cfmat::{letter_matrix, CfError, PTowerState};
use crate::field::{CharTwoField, Gf2mElem};

use super::{inv, rand_mat, rand_nonzero, run_identity, CheckConfig, IdentityReport};

/// Random `m_0` and the tower for `eps_0 .. eps_steps`.
fn tower(
    rng: &mut ChaCha8Rng,
    m: u32,
    steps: usize,
    eps: impl Fn(&mut ChaCha8Rng, usize) -> Gf2mElem,
) -> Result<Vec<PTowerState<Gf2mElem>>, CfError> {
    let m0 = rand_mat(rng, m);
    let mut states = vec![PTowerState::new(m0, eps(rng, 0))?];
    for i in 1..=steps {
        let e = eps(rng, i);
        let next = states[i - 1].advance(&e)?;
        states.push(next);
    }
    Ok(states)
}

/// Random period of length `n`, repeated.
fn periodic_eps(rng: &mut ChaCha8Rng, m: u32, n: usize) -> Vec<Gf2mElem> {
    (0..n).map(|_| rand_nonzero(rng, m)).collect()
}

/// `m_n = L_n (m_0 + d_0 b_0 / L_1 + ... + d_{n-1} b_{n-1} / L_n)` for
/// `n = 1..=n_steps`, with an arbitrary (not periodic) `eps`.
pub fn check_p_lemma1(n_steps: usize, cfg: &CheckConfig) -> IdentityReport {
    let bump = cfg.bump() as u128;
    let m = cfg.m;
    run_identity("p.lemma1", cfg, 1 << (2 * n_steps + 2), move |rng| {
        let st = tower(rng, m, n_steps, |r, _| rand_nonzero(r, m))?;
        let mut sum = st[0].m.clone();
        for n in 1..=n_steps {
            let term = st[n - 1].b.scale(&st[n - 1].d.mul(&inv(&st[n].big_l)?));
            sum = sum.add(&term);
            let rhs = sum.scale(&st[n].big_l.pow(1 + bump));
            if rhs != st[n].m {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// `l_{n+j} = L_n^(2^j) l_j` and `L_{n+j} = L_n^(2^j) L_j` for `j <= j_max`
/// when `eps` has period `n`. With `periodic = false` every `eps_i` is drawn
/// independently, which breaks the hypothesis.
pub fn check_p_lemma2(n: usize, j_max: usize, periodic: bool, cfg: &CheckConfig) -> Vec<IdentityReport> {
    let bump = cfg.bump() as u128;
    let m = cfg.m;
    let degree = 1u64 << (2 * (n + j_max) + 2);
    let draw = move |rng: &mut ChaCha8Rng| -> Result<Vec<PTowerState<Gf2mElem>>, CfError> {
        let period = periodic_eps(rng, m, n);
        tower(rng, m, n + j_max + 1, move |r, i| if periodic { period[i % n] } else { rand_nonzero(r, m) })
    };
    let tag = if periodic { "" } else { ",aperiodic" };
    let little = run_identity(&format!("p.lemma2.l[n={n}{tag}]"), cfg, degree, move |rng| {
        let st = draw(rng)?;
        let ln = &st[n].big_l;
        Ok((0..=j_max).all(|j| st[n + j].l == ln.pow((1u128 << j) + bump).mul(&st[j].l)))
    });
    let big = run_identity(&format!("p.lemma2.L[n={n}{tag}]"), cfg, degree, move |rng| {
        let st = draw(rng)?;
        let ln = &st[n].big_l;
        Ok((0..=j_max).all(|j| st[n + j].big_l == ln.pow((1u128 << j) + bump).mul(&st[j].big_l)))
    });
    vec![little, big]
}

/// Relations between whole periods of the tower, for `k <= k_max`:
///
/// * `d_{(k+1)n} = d_{kn}^(2^n) lambda`, `lambda = 1/(eps_0^(2^n) ... eps_{n-1}^2)`;
/// * `d_{i+1} = d_i^2 det A(eps_i)`;
/// * `L_{kn+j} = L_{kn}^(2^j) L_j` and `l_{kn+j} = L_{kn}^(2^j) l_j` for `j <= n`.
pub fn check_p_powers(n: usize, k_max: usize, cfg: &CheckConfig) -> Vec<IdentityReport> {
    let bump = cfg.bump();
    let m = cfg.m;
    let steps = (k_max + 1) * n + 1;
    let degree = 1u64 << (2 * steps + 2);
    let draw = move |rng: &mut ChaCha8Rng| -> Result<(Vec<Gf2mElem>, Vec<PTowerState<Gf2mElem>>), CfError> {
        let period = periodic_eps(rng, m, n);
        let p2 = period.clone();
        Ok((period, tower(rng, m, steps, move |_, i| p2[i % n])?))
    };
    let lambda = run_identity(&format!("p.det_lambda[n={n}]"), cfg, degree, move |rng| {
        let (period, st) = draw(rng)?;
        let lam = crate::cfmat::p_lambda(&period)?;
        Ok((0..k_max).all(|k| st[(k + 1) * n].d == st[k * n].d.frobenius(n as u32 + bump).mul(&lam)))
    });
    let det = run_identity(&format!("p.det_step[n={n}]"), cfg, degree, move |rng| {
        let (_, st) = draw(rng)?;
        for i in 0..steps {
            let a = letter_matrix(&st[i].eps)?;
            if st[i + 1].d != st[i].d.frobenius(1 + bump).mul(&a.det()) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    let shift = run_identity(&format!("p.period_shift[n={n}]"), cfg, degree, move |rng| {
        let (_, st) = draw(rng)?;
        for k in 1..=k_max {
            let lk = &st[k * n].big_l;
            for j in 0..=n.min(steps - k * n) {
                let p = lk.frobenius(j as u32 + bump);
                if st[k * n + j].big_l != p.mul(&st[j].big_l) {
                    return Ok(false);
                }
                if k * n + j < st.len() && st[k * n + j].l != p.mul(&st[j].l) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    });
    vec![lambda, det, shift]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::Status;
    use crate::cfmat::Mat2;
    use rand::SeedableRng;

    /// `m_1 = L_1 m_0 + d_0 b_0`, evaluated directly from one random draw.
    fn first_step_holds(rng: &mut ChaCha8Rng) -> Result<bool, CfError> {
        let st = tower(rng, 16, 1, |r, _| rand_nonzero(r, 16))?;
        let rhs: Mat2<Gf2mElem> = st[0].m.scale(&st[1].big_l).add(&st[0].b.scale(&st[0].d));
        Ok(rhs == st[1].m)
    }

    #[test]
    fn first_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(first_step_holds(&mut rng).unwrap());
        }
    }

    #[test]
    fn lemma1_and_mutant() {
        let cfg = CheckConfig { trials: 20, ..CheckConfig::default() };
        assert_eq!(check_p_lemma1(5, &cfg).status, Status::Pass);
        assert_eq!(check_p_lemma1(5, &cfg.mutated()).status, Status::Fail);
    }

    #[test]
    fn lemma2_needs_periodicity() {
        let cfg = CheckConfig { trials: 20, ..CheckConfig::default() };
        for r in check_p_lemma2(2, 3, true, &cfg) {
            assert_eq!(r.status, Status::Pass, "{r}");
        }
        for r in check_p_lemma2(2, 3, true, &cfg.mutated()) {
            assert_eq!(r.status, Status::Fail, "{r}");
        }
        let aperiodic = check_p_lemma2(2, 3, false, &cfg);
        assert!(aperiodic.iter().any(|r| r.status == Status::Fail));
    }

    #[test]
    fn constant_eps_is_fine_for_lemma1() {
        // The determinant lemma does not use periodicity; a constant eps is a special case.
        let cfg = CheckConfig { trials: 20, ..CheckConfig::default() };
        let r = run_identity("p.lemma1.const", &cfg, 64, |rng| {
            let e = rand_nonzero(rng, 16);
            let st = tower(rng, 16, 3, move |_, _| e.clone())?;
            let mut sum = st[0].m.clone();
            for n in 1..=3 {
                sum = sum.add(&st[n - 1].b.scale(&st[n - 1].d.mul(&inv(&st[n].big_l)?)));
                if sum.scale(&st[n].big_l) != st[n].m {
                    return Ok(false);
                }
            }
            Ok(true)
        });
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn period_powers() {
        let cfg = CheckConfig { trials: 20, ..CheckConfig::default() };
        for n in [1, 2, 3] {
            for r in check_p_powers(n, 3, &cfg) {
                assert_eq!(r.status, Status::Pass, "{r}");
            }
            for r in check_p_powers(n, 3, &cfg.mutated()) {
                assert_eq!(r.status, Status::Fail, "{r}");
            }
        }
    }
}
