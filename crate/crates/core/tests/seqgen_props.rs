use proptest::prelude::*;

use cf2::seqgen::{
    g_normalize, g_prefix, g_sigma, p_prefix, p_to_g, sigma_inv_word, sigma_word, word_stats, GSpec, PSpec, Word,
};

fn bits(max: usize, min: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(0u8..2, min..=max).prop_map(|b| Word::from_bits(&b))
}

fn pspec() -> impl Strategy<Value = PSpec> {
    (bits(4, 0), bits(4, 1)).prop_map(|(w0, eps)| PSpec::new(w0, eps).unwrap())
}

fn gspec() -> impl Strategy<Value = GSpec> {
    (1usize..=4)
        .prop_flat_map(|n| (bits(n, n), bits(n, n), bits(4, 1)))
        .prop_map(|(u0, v0, ups)| GSpec::new(u0, v0, ups).unwrap())
}

proptest! {
    #[test]
    fn p_prefixes_are_stable(spec in pspec(), a in 0usize..300, b in 0usize..300) {
        let (short, long) = (a.min(b), a.max(b));
        prop_assert_eq!(p_prefix(&spec, long).prefix(short), p_prefix(&spec, short));
    }

    #[test]
    fn g_prefixes_are_stable(spec in gspec(), a in 0usize..300, b in 0usize..300) {
        let (short, long) = (a.min(b), a.max(b));
        prop_assert_eq!(g_prefix(&spec, long).prefix(short), g_prefix(&spec, short));
    }

    #[test]
    fn p_words_nest(spec in pspec(), n in 0usize..6) {
        let w = spec.word(n);
        let next = spec.word(n + 1);
        prop_assert_eq!(next.len(), 2 * w.len() + 1);
        prop_assert_eq!(next.prefix(w.len()), w.clone());
        prop_assert_eq!(next.letters()[w.len()], spec.eps_at(n));
        prop_assert_eq!(&next.letters()[w.len() + 1..], w.letters());
    }

    #[test]
    fn sigma_inverts(w in bits(64, 1)) {
        let s = sigma_word(&w).unwrap();
        prop_assert_eq!(s.len(), w.len() + 1);
        prop_assert_eq!(s.letters()[0], b'0');
        prop_assert_eq!(sigma_inv_word(&s).unwrap(), w);
    }

    #[test]
    fn sigma_last_letter_is_digit_parity(w in bits(64, 1)) {
        let s = sigma_word(&w).unwrap();
        let t = word_stats(&w).unwrap().t;
        prop_assert_eq!(*s.letters().last().unwrap(), b'0' + t);
    }

    #[test]
    fn sigma_of_p_is_g(spec in pspec()) {
        let n = 1000;
        let g = p_to_g(&spec).unwrap();
        prop_assert_eq!(sigma_word(&p_prefix(&spec, n)).unwrap().prefix(n), g_prefix(&g, n));
    }

    #[test]
    fn sigma_of_g_is_g(spec in gspec()) {
        let n = 1000;
        let g = g_sigma(&spec).unwrap();
        prop_assert_eq!(sigma_word(&g_prefix(&spec, n)).unwrap().prefix(n), g_prefix(&g, n));
    }

    #[test]
    fn normalize_keeps_the_sequence(spec in gspec()) {
        prop_assume!(spec.ups_weight() > 0);
        let norm = g_normalize(&spec).unwrap();
        prop_assert_eq!(g_prefix(&norm.spec, 500), g_prefix(&spec, 500));
        prop_assert!(norm.spec.ups_at(0));
        prop_assert_eq!(word_stats(&norm.s).unwrap().t, 0);
        prop_assert_eq!(*norm.s.letters().last().unwrap(), b'1');
    }
}

#[test]
fn thue_morse_prefix_matches_digit_parity() {
    let spec: GSpec = "G u0=a v0=b ups=1".parse().unwrap();
    assert_eq!(g_prefix(&spec, 8).to_string(), "abbabaab");
}

#[test]
fn period_doubling_prefix() {
    let spec: PSpec = "P eps=10".parse().unwrap();
    assert_eq!(p_prefix(&spec, 8).to_string(), "10111010");
}
