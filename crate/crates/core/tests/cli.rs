fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cf2::cli::run(std::iter::once("cf2").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn gen_prints_the_prefix() {
    let (code, out, _) = run(&["gen", "--family", "P", "--w0", "", "--eps", "10", "--len", "8"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim_end(), "10111010");
}

#[test]
fn cf_of_a_short_word() {
    // [z; z, z] = z + z/(z^2 + 1), a geometric tail in z^-2.
    let (code, out, _) = run(&["cf", "--word", "zzz", "--map", "z=z", "--prec", "8"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim_end(), "z + z^-1 + z^-3 + z^-5 + z^-7 + O(z^-8)");
}

#[test]
fn constant_specialization_is_a_usage_error() {
    let (code, out, err) = run(&["theorem2", "--u0", "a", "--v0", "b", "--ups", "1", "--map", "a=1,b=z"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("constant specialization"), "{err}");
}

#[test]
fn unknown_letter_in_map_is_a_usage_error() {
    let (code, _, err) = run(&["theorem2", "--u0", "a", "--v0", "b", "--ups", "1", "--map", "a=z"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn low_precision_is_rejected_for_reports() {
    let (code, _, err) = run(&["theorem1", "--eps", "10", "--prec", "32"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn theorem2_thue_morse_report() {
    let (code, out, _) = run(&["theorem2", "--u0", "a", "--v0", "b", "--ups", "1", "--map", "a=z,b=z+1", "--prec", "256"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("# cf2 theorem2 prec=256 seed=0x1 map=a=z,b=z+1\n"), "{out}");
    assert!(out.contains("theorem2 pass"), "{out}");
    assert!(out.contains("degree=4 bound=4"), "{out}");
}

#[test]
fn identities_are_deterministic_and_echo_the_seed() {
    let args = ["identities", "--all", "--trials", "10", "--seed", "7"];
    let (code, first, _) = run(&args);
    let (_, second, _) = run(&args);
    let (_, sequential, _) = run(&[&args[..], &["--sequential"]].concat());
    assert_eq!(code, 0, "{first}");
    assert_eq!(first, second);
    assert_eq!(first, sequential);
    assert!(first.contains("seed=0x7"));
}

#[test]
fn mutated_identities_fail() {
    // Exit 0 means the negative control worked: every mutant was refuted.
    let (code, out, _) = run(&["identities", "--all", "--trials", "10", "--mutate"]);
    assert_eq!(code, 0);
    assert!(!out.lines().any(|l| l.contains(" pass trials=")), "{out}");
}

#[test]
fn explore_reports_without_judgment() {
    let (code, out, _) = run(&["explore-sigma-inv", "--degx", "8", "--prec", "512"]);
    assert_eq!(code, 0);
    assert!(out.contains("no relation found up to degree 8, degZ 16, prec 512"), "{out}");
}
