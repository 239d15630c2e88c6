//! The two word families and the summation operator.
//!
//! * `P(W0, eps)`: `W_{n+1} = W_n eps_n W_n`, limit of `W_n`.
//! * `G(u0, v0, ups)`: `u_{n+1} = u_n u_n`, `v_{n+1} = v_n v_n` when
//!   `ups_n = 0`, else `u_{n+1} = u_n v_n`, `v_{n+1} = v_n u_n`; limit of `u_n`.
//!
//! Periodic sequences are stored as one period; indexing is cyclic.
//!
//! On finite binary words, `sigma(w)` has length `|w| + 1`: entry `n` is
//! `w_0 + ... + w_{n-1} mod 2` for `n = 0..=|w|`, so its last entry is the
//! parity of `w`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error("seqgen: letter '{0}' is not binary")]
    NonBinary(char),
    #[error("seqgen: invalid letter '{0}' (expected ASCII alphanumeric)")]
    InvalidLetter(char),
    #[error("seqgen: word of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("seqgen: word of length {0} is too long for exact statistics")]
    TooLong(usize),
    #[error("seqgen: the period of {0} must be nonempty")]
    EmptyPeriod(&'static str),
    #[error("seqgen: initial word {0} must be nonempty")]
    EmptyInitialWord(&'static str),
    #[error("seqgen: degenerate: periodic repetition (ups has no 1)")]
    Degenerate,
    #[error("seqgen: cannot parse '{0}'")]
    Parse(String),
}

/// A finite word over single ASCII alphanumeric letters.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self, SeqError> {
        if let Some(&c) = letters.iter().find(|c| !c.is_ascii_alphanumeric()) {
            return Err(SeqError::InvalidLetter(c as char));
        }
        Ok(Self(letters))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Word over `{0, 1}` from bits.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| if b & 1 == 1 { b'1' } else { b'0' }).collect())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&c| c == b'0' || c == b'1')
    }

    /// The letters as bits; errors on the first non-binary letter.
    pub fn to_bits(&self) -> Result<Vec<u8>, SeqError> {
        self.0
            .iter()
            .map(|&c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                other => Err(SeqError::NonBinary(other as char)),
            })
            .collect()
    }

    pub fn alphabet(&self) -> BTreeSet<u8> {
        self.0.iter().copied().collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }

    /// Bitwise complement of a binary word.
    pub fn complement(&self) -> Result<Word, SeqError> {
        Ok(Word::from_bits(&self.to_bits()?.iter().map(|b| b ^ 1).collect::<Vec<_>>()))
    }

    /// Rotates left by `k` (cyclic shift of a period).
    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    fn cyclic(&self, n: usize) -> u8 {
        self.0[n % self.0.len()]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(&self.0).expect("ASCII"))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl FromStr for Word {
    type Err = SeqError;
    fn from_str(s: &str) -> Result<Self, SeqError> {
        let s = s.trim();
        let s = if s == "\"\"" { "" } else { s };
        Word::new(s.as_bytes().to_vec())
    }
}

/// `P(W0, eps)` with `eps` given by one period.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PSpec {
    w0: Word,
    eps: Word,
}

impl PSpec {
    pub fn new(w0: Word, eps: Word) -> Result<Self, SeqError> {
        if eps.is_empty() {
            return Err(SeqError::EmptyPeriod("eps"));
        }
        Ok(Self { w0, eps })
    }

    pub fn w0(&self) -> &Word {
        &self.w0
    }

    pub fn eps(&self) -> &Word {
        &self.eps
    }

    /// Length of the period of `eps`.
    pub fn period(&self) -> usize {
        self.eps.len()
    }

    pub fn eps_at(&self, n: usize) -> u8 {
        self.eps.cyclic(n)
    }

    pub fn alphabet(&self) -> BTreeSet<u8> {
        let mut a = self.w0.alphabet();
        a.extend(self.eps.alphabet());
        a
    }

    pub fn is_binary(&self) -> bool {
        self.w0.is_binary() && self.eps.is_binary()
    }

    /// `W_n`.
    pub fn word(&self, n: usize) -> Word {
        let mut w = self.w0.0.clone();
        for i in 0..n {
            let mut next = Vec::with_capacity(2 * w.len() + 1);
            next.extend_from_slice(&w);
            next.push(self.eps_at(i));
            next.extend_from_slice(&w);
            w = next;
        }
        Word(w)
    }
}

impl fmt::Display for PSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P w0={} eps={}", self.w0, self.eps)
    }
}

impl FromStr for PSpec {
    type Err = SeqError;
    fn from_str(s: &str) -> Result<Self, SeqError> {
        let fields = parse_fields(s, "P", &["w0", "eps"])?;
        PSpec::new(fields[0].parse()?, fields[1].parse()?)
    }
}

/// `G(u0, v0, ups)` with `ups` given by one period of bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GSpec {
    u0: Word,
    v0: Word,
    ups: Word,
}

impl GSpec {
    pub fn new(u0: Word, v0: Word, ups: Word) -> Result<Self, SeqError> {
        if u0.is_empty() {
            return Err(SeqError::EmptyInitialWord("u0"));
        }
        if v0.is_empty() {
            return Err(SeqError::EmptyInitialWord("v0"));
        }
        if ups.is_empty() {
            return Err(SeqError::EmptyPeriod("ups"));
        }
        ups.to_bits()?;
        Ok(Self { u0, v0, ups })
    }

    pub fn u0(&self) -> &Word {
        &self.u0
    }

    pub fn v0(&self) -> &Word {
        &self.v0
    }

    pub fn ups(&self) -> &Word {
        &self.ups
    }

    pub fn period(&self) -> usize {
        self.ups.len()
    }

    pub fn ups_at(&self, n: usize) -> bool {
        self.ups.cyclic(n) == b'1'
    }

    pub fn alphabet(&self) -> BTreeSet<u8> {
        let mut a = self.u0.alphabet();
        a.extend(self.v0.alphabet());
        a
    }

    pub fn is_binary(&self) -> bool {
        self.u0.is_binary() && self.v0.is_binary()
    }

    /// `(u_n, v_n)`.
    pub fn words(&self, n: usize) -> (Word, Word) {
        let (mut u, mut v) = (self.u0.0.clone(), self.v0.0.clone());
        for i in 0..n {
            let (nu, nv) = if self.ups_at(i) {
                ([u.as_slice(), v.as_slice()].concat(), [v.as_slice(), u.as_slice()].concat())
            } else {
                ([u.as_slice(), u.as_slice()].concat(), [v.as_slice(), v.as_slice()].concat())
            };
            u = nu;
            v = nv;
        }
        (Word(u), Word(v))
    }

    /// Number of 1's in one period of `ups`.
    pub fn ups_weight(&self) -> usize {
        self.ups.letters().iter().filter(|&&c| c == b'1').count()
    }
}

impl fmt::Display for GSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G u0={} v0={} ups={}", self.u0, self.v0, self.ups)
    }
}

impl FromStr for GSpec {
    type Err = SeqError;
    fn from_str(s: &str) -> Result<Self, SeqError> {
        let fields = parse_fields(s, "G", &["u0", "v0", "ups"])?;
        GSpec::new(fields[0].parse()?, fields[1].parse()?, fields[2].parse()?)
    }
}

fn parse_fields(s: &str, tag: &str, keys: &[&str]) -> Result<Vec<String>, SeqError> {
    let bad = || SeqError::Parse(s.to_string());
    let mut parts = s.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(bad());
    }
    let mut out = vec![None; keys.len()];
    for part in parts {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        let idx = keys.iter().position(|&key| key == k).ok_or_else(bad)?;
        if out[idx].replace(v.to_string()).is_some() {
            return Err(bad());
        }
    }
    // A missing key reads as the empty word (`P eps=10` has W0 empty).
    Ok(out.into_iter().map(Option::unwrap_or_default).collect())
}

/// First `len` letters of `P(W0, eps)`.
pub fn p_prefix(spec: &PSpec, len: usize) -> Word {
    let mut w = spec.w0.0.clone();
    let mut n = 0;
    while w.len() < len {
        let mut next = Vec::with_capacity(2 * w.len() + 1);
        next.extend_from_slice(&w);
        next.push(spec.eps_at(n));
        next.extend_from_slice(&w);
        w = next;
        n += 1;
    }
    w.truncate(len);
    Word(w)
}

/// First `len` letters of `G(u0, v0, ups)`.
pub fn g_prefix(spec: &GSpec, len: usize) -> Word {
    let (mut u, mut v) = (spec.u0.0.clone(), spec.v0.0.clone());
    let mut n = 0;
    while u.len() < len {
        if spec.ups_at(n) {
            let nu = [u.as_slice(), v.as_slice()].concat();
            v.extend_from_slice(&u);
            u = nu;
        } else {
            u.extend_from_within(..);
            v.extend_from_within(..);
        }
        n += 1;
    }
    u.truncate(len);
    Word(u)
}

/// Exclusive prefix sums mod 2, including the final total.
pub fn sigma_word(w: &Word) -> Result<Word, SeqError> {
    let bits = w.to_bits()?;
    let mut out = Vec::with_capacity(bits.len() + 1);
    let mut acc = 0u8;
    out.push(0);
    for b in bits {
        acc ^= b;
        out.push(acc);
    }
    Ok(Word::from_bits(&out))
}

/// Successive differences mod 2: entry `n` is `w_{n+1} + w_n`.
pub fn sigma_inv_word(w: &Word) -> Result<Word, SeqError> {
    if w.len() < 2 {
        return Err(SeqError::TooShort { len: w.len(), min: 2 });
    }
    let bits = w.to_bits()?;
    Ok(Word::from_bits(&bits.windows(2).map(|p| p[0] ^ p[1]).collect::<Vec<_>>()))
}

/// Digit-sum parity `t`, the doubling statistic `e`, and the prefix
/// parities `delta_j = t(s(j))` for `j = 1..=|s|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordStats {
    pub t: u8,
    pub e: u128,
    pub delta: Vec<u8>,
}

impl WordStats {
    /// `e(s(j))` for `j = 0..=|s|`.
    pub fn prefix_e(s: &Word) -> Result<Vec<u128>, SeqError> {
        let bits = s.to_bits()?;
        if bits.len() > 120 {
            return Err(SeqError::TooLong(bits.len()));
        }
        let mut out = vec![0u128];
        let (mut t, mut e) = (0u8, 0u128);
        for b in bits {
            t ^= b;
            e = 2 * e + t as u128;
            out.push(e);
        }
        Ok(out)
    }
}

pub fn word_stats(s: &Word) -> Result<WordStats, SeqError> {
    let es = WordStats::prefix_e(s)?;
    let bits = s.to_bits()?;
    let mut delta = Vec::with_capacity(bits.len());
    let mut t = 0u8;
    for b in bits {
        t ^= b;
        delta.push(t);
    }
    Ok(WordStats { t, e: *es.last().expect("nonempty"), delta })
}

/// `sigma(P(W0, eps)) = G(sigma(W1), complement, ups)` with
/// `ups_k = 1 - [eps_k == eps_{k+1}]`.
pub fn p_to_g(spec: &PSpec) -> Result<GSpec, SeqError> {
    spec.eps.to_bits()?;
    let u0 = sigma_word(&spec.word(1))?;
    let v0 = u0.complement()?;
    let n = spec.period();
    let ups: Vec<u8> = (0..n).map(|k| (spec.eps_at(k) != spec.eps_at(k + 1)) as u8).collect();
    GSpec::new(u0, v0, Word::from_bits(&ups))
}

/// `sigma(G(u0, v0, ups)) = G(sigma(u2)*, sigma(v2)*, ups shifted by 2)`,
/// where `a*` drops the last letter of `a`.
pub fn g_sigma(spec: &GSpec) -> Result<GSpec, SeqError> {
    let (u2, v2) = spec.words(2);
    let star = |w: &Word| -> Result<Word, SeqError> {
        let s = sigma_word(w)?;
        Ok(s.prefix(s.len() - 1))
    };
    GSpec::new(star(&u2)?, star(&v2)?, spec.ups.rotate(2))
}

/// Equivalent `G` spec whose `ups` starts with 1, with `s` the period
/// following that leading 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub spec: GSpec,
    /// `ups_1 .. ups_k` of the rotated sequence (two periods when one period
    /// has an odd number of 1's).
    pub s: Word,
    /// How many leading steps were absorbed into the initial words.
    pub shift: usize,
    pub doubled: bool,
}

pub fn g_normalize(spec: &GSpec) -> Result<Normalized, SeqError> {
    let bits = spec.ups.to_bits()?;
    let shift = bits.iter().position(|&b| b == 1).ok_or(SeqError::Degenerate)?;
    let (u, v) = spec.words(shift);
    let ups = spec.ups.rotate(shift);
    let new_spec = GSpec::new(u, v, ups.clone())?;
    let doubled = spec.ups_weight() % 2 == 1;
    let period = if doubled { ups.repeat(2) } else { ups };
    let s = period.rotate(1);
    Ok(Normalized { spec: new_spec, s, shift, doubled })
}
