//! Command-line front end. Every command writes a line-oriented report;
//! exit status 0 means success, 1 a failed mathematical check, 2 a usage
//! error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algrel::{
    check_corollary, check_theorem1, check_theorem2, default_degz, explore_sigma_inv, search_relation, AlgError,
};
use crate::cfmat::{
    cf_prefix_len, cf_series, convergent_series, g_tower_limits, p_tower_limits, CfError, SpecializationMap,
};
use crate::field::{CharTwoField, LaurentSeries};
use crate::identity::{
    check_valuation_bounds_g, check_valuation_bounds_p, standard_suite, CheckConfig, Status,
};
use crate::par::Exec;
use crate::seqgen::{g_prefix, p_prefix, sigma_inv_word, sigma_word, GSpec, PSpec, SeqError, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Smallest precision the tower and relation commands accept.
pub const MIN_PREC: i64 = 64;

#[derive(Debug, Parser)]
#[command(name = "cf2", version, about = "Continued fractions over GF(2)((1/z)) of automatic sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Absolute precision in powers of 1/z (at least 64, except for `cf`).
    #[arg(long, global = true, env = "CF2_PREC", default_value_t = 512, value_parser = clap::value_parser!(i64).range(1..))]
    pub prec: i64,

    /// Seed of the randomized identity checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Letter specialization, e.g. `a=z,b=z+1` (default `0=z,1=z+1`).
    #[arg(long, global = true)]
    pub map: Option<String>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Run data-parallel loops sequentially.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "G", alias = "g")]
    G,
}

/// Sequence flags shared by the commands that accept either family.
#[derive(Debug, Clone, Args)]
pub struct SeqArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Seed word `W0` of a `P` sequence.
    #[arg(long, default_value = "")]
    pub w0: String,
    /// One period of `eps`.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub u0: Option<String>,
    #[arg(long)]
    pub v0: Option<String>,
    /// One period of `Upsilon`.
    #[arg(long)]
    pub ups: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PArgs {
    #[arg(long, default_value = "")]
    pub w0: String,
    #[arg(long)]
    pub eps: String,
}

#[derive(Debug, Clone, Args)]
pub struct GArgs {
    #[arg(long)]
    pub u0: String,
    #[arg(long)]
    pub v0: String,
    #[arg(long)]
    pub ups: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prefix of a sequence.
    Gen {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        len: usize,
    },
    /// sigma (or sigma^-1) of a prefix of a binary sequence.
    Sigma {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        inverse: bool,
    },
    /// Continued fraction as a series: of a finite word, or of a sequence.
    Cf {
        #[arg(long, conflicts_with_all = ["family", "eps", "ups"])]
        word: Option<String>,
        #[command(flatten)]
        seq: SeqArgs,
    },
    /// One line per tower step: `step=<n> val(d)=<v> val(L-1)=<v>`.
    TowerTrace {
        #[command(flatten)]
        seq: SeqArgs,
    },
    /// Randomized identity checks over GF(2^m).
    Identities {
        /// The whole identity suite (the default).
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Extension degree of the check field.
        #[arg(long, default_value_t = 16)]
        m: u32,
        /// Perturb one exponent in every identity (every line must fail).
        #[arg(long)]
        mutate: bool,
        /// Also report the valuation facts on the shipped fixtures.
        #[arg(long)]
        valuations: bool,
    },
    /// Search for an algebraic relation of a continued fraction.
    Relation {
        #[arg(long, conflicts_with_all = ["family", "eps", "ups"])]
        word: Option<String>,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 4)]
        degx: usize,
        /// Coefficient degree bound (default from the search policy).
        #[arg(long)]
        degz: Option<usize>,
    },
    /// Degree bound 2^n for a `P(W0, eps)` sequence.
    Theorem1 {
        #[command(flatten)]
        p: PArgs,
    },
    /// Degree bound 2^k for a `G(u0, v0, ups)` sequence.
    Theorem2 {
        #[command(flatten)]
        g: GArgs,
    },
    /// sigma^k of a `P` sequence against the bound 2^n.
    Corollary {
        #[command(flatten)]
        p: PArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Bounded relation search for sigma^-1 of a `P` sequence (observation only).
    ExploreSigmaInv {
        #[arg(long, default_value = "")]
        w0: String,
        #[arg(long, default_value = "10")]
        eps: String,
        #[arg(long, default_value_t = 8)]
        degx: usize,
        #[arg(long)]
        degz: Option<usize>,
    },
}

/// A failure with its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

fn is_usage_cf(e: &CfError) -> bool {
    matches!(
        e,
        CfError::UnmappedLetter(_)
            | CfError::ConstantSpecialization(_)
            | CfError::Parse(_)
            | CfError::EmptyWord
            | CfError::HypothesisViolation(_)
            | CfError::UnequalLengths(..)
            | CfError::Seq(_)
    )
}

impl From<SeqError> for CliError {
    fn from(e: SeqError) -> Self {
        CliError::usage(format!("seqgen: {e}"))
    }
}

impl From<CfError> for CliError {
    fn from(e: CfError) -> Self {
        let code = if is_usage_cf(&e) { EXIT_USAGE } else { EXIT_CHECK_FAILED };
        CliError { code, message: e.to_string() }
    }
}

impl From<AlgError> for CliError {
    fn from(e: AlgError) -> Self {
        match e {
            AlgError::Cf(c) => c.into(),
            AlgError::Seq(s) => s.into(),
            AlgError::Precision { .. } | AlgError::ZeroDegree | AlgError::Parse(_) | AlgError::Hypothesis(_) => {
                CliError::usage(e.to_string())
            }
        }
    }
}

enum Spec {
    P(PSpec),
    G(GSpec),
}

impl Spec {
    fn prefix(&self, len: usize) -> Word {
        match self {
            Spec::P(s) => p_prefix(s, len),
            Spec::G(s) => g_prefix(s, len),
        }
    }
}

fn word(s: &str) -> Result<Word, CliError> {
    Ok(s.parse::<Word>()?)
}

fn p_spec(w0: &str, eps: &str) -> Result<PSpec, CliError> {
    Ok(PSpec::new(word(w0)?, word(eps)?)?)
}

fn g_spec(u0: &str, v0: &str, ups: &str) -> Result<GSpec, CliError> {
    Ok(GSpec::new(word(u0)?, word(v0)?, word(ups)?)?)
}

impl SeqArgs {
    fn spec(&self) -> Result<Spec, CliError> {
        let family = match self.family {
            Some(f) => f,
            None if self.ups.is_some() => Family::G,
            None if self.eps.is_some() => Family::P,
            None => return Err(CliError::usage("--family (or --eps / --ups) is required")),
        };
        let need = |v: &Option<String>, flag: &str| {
            v.clone().ok_or_else(|| CliError::usage(format!("--{flag} is required for this family")))
        };
        Ok(match family {
            Family::P => Spec::P(p_spec(&self.w0, &need(&self.eps, "eps")?)?),
            Family::G => Spec::G(g_spec(&need(&self.u0, "u0")?, &need(&self.v0, "v0")?, &need(&self.ups, "ups")?)?),
        })
    }
}

struct Ctx {
    prec: i64,
    seed: u64,
    sp: SpecializationMap,
}

/// Report text and exit status of one command.
pub struct Outcome {
    pub report: String,
    pub code: i32,
}

fn status_code(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn config_echo(cli: &Cli, ctx: &Ctx) -> String {
    let name = format!("{:?}", cli.command);
    let name = name.split([' ', '{', '(']).next().unwrap_or("").to_string();
    format!("# cf2 {} prec={} seed={:#x} map={}", kebab(&name), ctx.prec, ctx.seed, ctx.sp)
}

fn kebab(s: &str) -> String {
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if c.is_ascii_uppercase() && i > 0 {
            out.push('-');
        }
        out.push(c.to_ascii_lowercase());
    }
    out
}

fn cf_of(spec: &Spec, ctx: &Ctx, prec: i64) -> Result<LaurentSeries, CliError> {
    Ok(cf_series(&spec.prefix(cf_prefix_len(prec)), &ctx.sp, prec)?)
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let sp = match &cli.map {
        Some(text) => text.parse::<SpecializationMap>()?,
        None => SpecializationMap::default_binary(),
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let ctx = Ctx { prec: cli.prec, seed: cli.seed, sp };
    if ctx.prec < MIN_PREC && !matches!(cli.command, Command::Cf { .. } | Command::Gen { .. } | Command::Sigma { .. }) {
        return Err(CliError::usage(format!("--prec must be at least {MIN_PREC} for this command")));
    }
    let echo = config_echo(cli, &ctx);
    let mut out = String::new();
    let mut code = EXIT_OK;
    let prec = ctx.prec;

    match &cli.command {
        Command::Gen { seq, len } => {
            out.push_str(&seq.spec()?.prefix(*len).to_string());
            out.push('\n');
        }
        Command::Sigma { seq, len, inverse } => {
            let w = seq.spec()?.prefix(*len);
            let s = if *inverse { sigma_inv_word(&w)? } else { sigma_word(&w)? };
            writeln!(out, "{s}").expect("string");
        }
        Command::Cf { word: Some(w), .. } => {
            let w = word(w)?;
            writeln!(out, "{}", convergent_series(&w, &ctx.sp, prec)?).expect("string");
        }
        Command::Cf { seq, .. } => {
            writeln!(out, "{}", cf_of(&seq.spec()?, &ctx, prec)?).expect("string");
        }
        Command::TowerTrace { seq } => {
            out.push_str(&echo);
            out.push('\n');
            match seq.spec()? {
                Spec::P(s) => {
                    for st in p_tower_limits(&s, &ctx.sp, prec)?.states {
                        writeln!(out, "{}", st.trace_line()).expect("string");
                    }
                }
                Spec::G(s) => {
                    let one = LaurentSeries::one();
                    for g in g_tower_limits(&s, &ctx.sp, prec)?.gens {
                        let lm1 = g.big_l.add(&one).valuation();
                        writeln!(out, "step={} val(d)={} val(L-1)={}", g.gen, g.q.d.valuation(), lm1).expect("string");
                    }
                }
            }
        }
        Command::Identities { all: _, trials, m, mutate, valuations } => {
            out.push_str(&echo);
            writeln!(out, " trials={trials} m={m} mutate={mutate}").expect("string");
            if crate::field::gf2m_modulus(*m).is_err() {
                return Err(CliError::usage(format!("--m {m} is not a supported extension degree")));
            }
            let cfg = CheckConfig { trials: *trials, m: *m, seed: ctx.seed, mutate: *mutate, exec, ..Default::default() };
            let reports = standard_suite(&cfg);
            let mut all_pass = true;
            for r in &reports {
                writeln!(out, "{r}").expect("string");
                all_pass &= r.status == Status::Pass;
            }
            let passed = reports.iter().filter(|r| r.status == Status::Pass).count();
            writeln!(out, "summary {passed}/{} pass", reports.len()).expect("string");
            if *mutate {
                // every mutant must be refuted
                code = status_code(reports.iter().all(|r| r.status == Status::Fail));
            } else {
                code = status_code(all_pass);
            }
            if *valuations {
                let sp = SpecializationMap::default_binary();
                for eps in ["1", "10", "100"] {
                    let r = check_valuation_bounds_p(&p_spec("", eps)?, &sp, 6, prec)?;
                    write_valuation(&mut out, &r);
                    code = code.max(status_code(r.status() == Status::Pass));
                }
                for ups in ["1", "011", "1001"] {
                    let r = check_valuation_bounds_g(&g_spec("0", "1", ups)?, &sp, prec)?;
                    write_valuation(&mut out, &r);
                    code = code.max(status_code(r.status() == Status::Pass));
                }
            }
        }
        Command::Relation { word: w, seq, degx, degz } => {
            out.push_str(&echo);
            out.push('\n');
            let (lo, hi) = match w {
                Some(w) => {
                    let w = word(w)?;
                    (convergent_series(&w, &ctx.sp, prec)?, convergent_series(&w, &ctx.sp, 2 * prec)?)
                }
                None => {
                    let spec = seq.spec()?;
                    (cf_of(&spec, &ctx, prec)?, cf_of(&spec, &ctx, 2 * prec)?)
                }
            };
            let degz = degz.unwrap_or_else(|| default_degz(*degx, ctx.sp.max_degree()));
            let s = search_relation(&lo, &hi, *degx, degz, exec)?;
            writeln!(out, "{}", s.summary()).expect("string");
            if let Some(rel) = &s.relation {
                writeln!(out, "relation {rel}").expect("string");
            }
            for line in &s.log {
                writeln!(out, "search {line}").expect("string");
            }
            code = status_code(s.relation.is_some());
        }
        Command::Theorem1 { p } => {
            out.push_str(&echo);
            out.push('\n');
            let r = check_theorem1(&p_spec(&p.w0, &p.eps)?, &ctx.sp, prec, exec)?;
            out.push_str(&r.to_string());
            code = status_code(r.status() == Status::Pass);
        }
        Command::Theorem2 { g } => {
            out.push_str(&echo);
            out.push('\n');
            let r = check_theorem2(&g_spec(&g.u0, &g.v0, &g.ups)?, &ctx.sp, prec, exec)?;
            out.push_str(&r.to_string());
            code = status_code(r.status() == Status::Pass);
        }
        Command::Corollary { p, k } => {
            out.push_str(&echo);
            out.push('\n');
            let r = check_corollary(&p_spec(&p.w0, &p.eps)?, &ctx.sp, *k, prec, exec)?;
            out.push_str(&r.to_string());
            code = status_code(r.status() == Status::Pass);
        }
        Command::ExploreSigmaInv { w0, eps, degx, degz } => {
            out.push_str(&echo);
            out.push('\n');
            let degz = degz.unwrap_or_else(|| default_degz(*degx, ctx.sp.max_degree()));
            let r = explore_sigma_inv(&p_spec(w0, eps)?, &ctx.sp, *degx, degz, prec, exec)?;
            writeln!(out, "{r}").expect("string");
            if matches!(r.outcome, crate::algrel::ExploreOutcome::Infeasible { .. }) {
                code = EXIT_USAGE;
            }
        }
    }
    Ok(Outcome { report: out, code })
}

fn write_valuation(out: &mut String, r: &crate::identity::ValuationReport) {
    writeln!(out, "{r}").expect("string");
    for c in &r.checks {
        writeln!(out, "  {c}").expect("string");
    }
}

/// Parses `argv`, runs the command, writes the report and returns the exit
/// status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &o.report),
                None => stdout.write_all(o.report.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "cli: cannot write report: {e}");
                return EXIT_USAGE;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
