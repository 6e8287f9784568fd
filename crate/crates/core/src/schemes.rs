//! Challenge spaces, response functions and response codes of the keyless
//! schemes (Basic, Multiblock, Linear Combination versions 1 and 2). The
//! keyed Shacham-Waters variant shares the linear-combination challenge
//! spaces; here its response is projected to the `mu` component.
//!
//! Every challenge space has a fixed canonical order so that response
//! vectors are reproducible:
//!
//! * Basic: ascending index `1..=n`.
//! * Multiblock: `l`-subsets of `{1..n}` in colexicographic order.
//! * Linear combination: vectors of `(F_q)^n` in lexicographic order (first
//!   coordinate most significant), keeping only nonzero vectors (version 1)
//!   or weight-`l` vectors (version 2).

use std::fmt;
use std::str::FromStr;

use crate::algebra::{hamming, FieldElement, FieldVector, PrimeField};
use crate::coding::{parse_num, rs_code, CodeKind, EncodedMessage, LinearCode};
use crate::error::{too_large, Error, Result};

/// Default cap on `gamma` for anything that enumerates the challenge space.
pub const DEFAULT_CHALLENGE_CAP: u128 = 1 << 24;
/// Default cap on `q^k` when building a response code.
pub const DEFAULT_RESPONSE_CODE_CAP: u128 = 1 << 20;

/// Challenge ordinal in the canonical order of a challenge space.
pub type Ordinal = u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Basic,
    Multiblock,
    LcV1,
    LcV2,
    ShachamWaters,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Basic => "basic",
            SchemeKind::Multiblock => "multiblock",
            SchemeKind::LcV1 => "lc-v1",
            SchemeKind::LcV2 => "lc-v2",
            SchemeKind::ShachamWaters => "sw",
        }
    }

    /// Byte used for this kind in the HELLO frame.
    pub fn wire_id(&self) -> u8 {
        match self {
            SchemeKind::Basic => 1,
            SchemeKind::Multiblock => 2,
            SchemeKind::LcV1 => 3,
            SchemeKind::LcV2 => 4,
            SchemeKind::ShachamWaters => 5,
        }
    }

    pub fn from_wire_id(id: u8) -> Option<Self> {
        Some(match id {
            1 => SchemeKind::Basic,
            2 => SchemeKind::Multiblock,
            3 => SchemeKind::LcV1,
            4 => SchemeKind::LcV2,
            5 => SchemeKind::ShachamWaters,
            _ => return None,
        })
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "basic" => SchemeKind::Basic,
            "multiblock" => SchemeKind::Multiblock,
            "lc-v1" | "lcv1" | "lc1" => SchemeKind::LcV1,
            "lc-v2" | "lcv2" | "lc2" => SchemeKind::LcV2,
            "sw" | "shacham-waters" => SchemeKind::ShachamWaters,
            other => return Err(Error::Parameter(format!("unknown scheme '{other}'"))),
        })
    }
}

/// The set `Gamma` a challenge is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChallengeSpace {
    /// `{1, ..., n}`
    Indices { n: usize },
    /// `l`-subsets of `{1, ..., n}`
    Subsets { n: usize, ell: usize },
    /// nonzero vectors of `(F_q)^n`
    NonzeroVectors { n: usize },
    /// weight-`l` vectors of `(F_q)^n`
    WeightVectors { n: usize, ell: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Challenge {
    /// 1-based block index.
    Index(usize),
    /// Strictly increasing 1-based block indices.
    Subset(Vec<usize>),
    /// Coefficient vector `V`.
    Vector(FieldVector),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Response {
    Element(FieldElement),
    Tuple(Vec<FieldElement>),
    Pair { mu: FieldElement, tau: FieldElement },
}

impl Response {
    /// Components in wire order.
    pub fn elements(&self) -> Vec<FieldElement> {
        match self {
            Response::Element(e) => vec![*e],
            Response::Tuple(es) => es.clone(),
            Response::Pair { mu, tau } => vec![*mu, *tau],
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        match (self, other) {
            (Response::Element(_), Response::Element(_)) => true,
            (Response::Tuple(a), Response::Tuple(b)) => a.len() == b.len(),
            (Response::Pair { .. }, Response::Pair { .. }) => true,
            _ => false,
        }
    }

    /// The response with its first component increased by one.
    pub fn perturbed(&self) -> Response {
        let bump = |e: FieldElement| e.field().elem(e.value() + 1);
        match self {
            Response::Element(e) => Response::Element(bump(*e)),
            Response::Tuple(es) => {
                let mut es = es.clone();
                if let Some(first) = es.first_mut() {
                    *first = bump(*first);
                }
                Response::Tuple(es)
            }
            Response::Pair { mu, tau } => Response::Pair { mu: bump(*mu), tau: *tau },
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::Element(e) => write!(f, "{e}"),
            Response::Tuple(es) => {
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Response::Pair { mu, tau } => write!(f, "(mu={mu},tau={tau})"),
        }
    }
}

/// A scheme instance: kind, message code and (where needed) challenge weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    kind: SchemeKind,
    code: LinearCode,
    ell: Option<usize>,
}

impl Scheme {
    /// `ell` is required for Multiblock and LCv2, forbidden for Basic and
    /// LCv1, and selects the weight-`ell` challenge space for Shacham-Waters
    /// (absent means all nonzero vectors).
    pub fn new(kind: SchemeKind, code: LinearCode, ell: Option<usize>) -> Result<Self> {
        let n = code.n();
        let ell = ell.filter(|&l| l != 0);
        match (kind, ell) {
            (SchemeKind::Multiblock | SchemeKind::LcV2, None) => {
                return Err(Error::Parameter(format!("scheme {kind} requires ell")));
            }
            (SchemeKind::Basic | SchemeKind::LcV1, Some(_)) => {
                return Err(Error::Parameter(format!("scheme {kind} takes no ell")));
            }
            (_, Some(l)) if l > n => {
                return Err(Error::Parameter(format!("ell={l} exceeds n={n}")));
            }
            _ => {}
        }
        Ok(Self { kind, code, ell })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn field(&self) -> PrimeField {
        self.code.field()
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn ell(&self) -> Option<usize> {
        self.ell
    }

    pub fn challenge_space(&self) -> ChallengeSpace {
        let n = self.n();
        match (self.kind, self.ell) {
            (SchemeKind::Basic, _) => ChallengeSpace::Indices { n },
            (SchemeKind::Multiblock, Some(ell)) => ChallengeSpace::Subsets { n, ell },
            (SchemeKind::LcV2 | SchemeKind::ShachamWaters, Some(ell)) => {
                ChallengeSpace::WeightVectors { n, ell }
            }
            _ => ChallengeSpace::NonzeroVectors { n },
        }
    }

    /// Number of field elements in one (wire-level) response.
    pub fn response_arity(&self) -> usize {
        match self.kind {
            SchemeKind::Multiblock => self.ell.unwrap_or(1),
            SchemeKind::ShachamWaters => 2,
            _ => 1,
        }
    }

    /// `gamma = |Gamma|`; `TooLargeToEnumerate` if it overflows `u128`.
    pub fn challenge_count(&self) -> Result<u128> {
        let q = self.field().modulus() as u128;
        let overflow = || too_large("challenge space", "more than 2^128", u128::MAX);
        match self.challenge_space() {
            ChallengeSpace::Indices { n } => Ok(n as u128),
            ChallengeSpace::Subsets { n, ell } => binom_u128(n, ell).ok_or_else(overflow),
            ChallengeSpace::NonzeroVectors { n } => {
                q.checked_pow(n as u32).map(|x| x - 1).ok_or_else(overflow)
            }
            ChallengeSpace::WeightVectors { n, ell } => {
                weight_count(q, n, ell).ok_or_else(overflow)
            }
        }
    }

    fn enumerable_gamma(&self, cap: u128) -> Result<u128> {
        let gamma = self.challenge_count()?;
        if gamma > cap {
            return Err(too_large("challenge space", gamma, cap));
        }
        Ok(gamma)
    }

    /// Checks the membership predicate of `Gamma`.
    pub fn validate_challenge(&self, c: &Challenge) -> Result<()> {
        let n = self.n();
        let bad = |msg: String| Err(Error::InvalidChallenge(msg));
        match (self.challenge_space(), c) {
            (ChallengeSpace::Indices { n }, Challenge::Index(i)) => {
                if *i == 0 || *i > n {
                    return bad(format!("index {i} outside 1..={n}"));
                }
            }
            (ChallengeSpace::Subsets { n, ell }, Challenge::Subset(js)) => {
                if js.len() != ell {
                    return bad(format!("subset has {} indices, expected {ell}", js.len()));
                }
                if js.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("subset indices must be strictly increasing".into());
                }
                if js.first() == Some(&0) || js.last().is_some_and(|&j| j > n) {
                    return bad(format!("subset index outside 1..={n}"));
                }
            }
            (
                ChallengeSpace::NonzeroVectors { .. } | ChallengeSpace::WeightVectors { .. },
                Challenge::Vector(v),
            ) => {
                if v.field() != self.field() {
                    return Err(Error::MismatchedFields {
                        left: self.field().modulus(),
                        right: v.field().modulus(),
                    });
                }
                if v.len() != n {
                    return bad(format!("vector has length {}, expected {n}", v.len()));
                }
                match self.challenge_space() {
                    ChallengeSpace::NonzeroVectors { .. } if v.is_zero() => {
                        return bad("zero vector is not a challenge".into());
                    }
                    ChallengeSpace::WeightVectors { ell, .. } if v.weight() != ell => {
                        return bad(format!("vector has weight {}, expected {ell}", v.weight()));
                    }
                    _ => {}
                }
            }
            _ => return bad(format!("challenge shape does not match scheme {}", self.kind)),
        }
        Ok(())
    }

    /// The challenge at position `ordinal` of the canonical order.
    pub fn challenge_at(&self, ordinal: Ordinal) -> Result<Challenge> {
        let gamma = self.challenge_count()?;
        if ordinal >= gamma {
            return Err(Error::OrdinalOutOfRange { ordinal, gamma });
        }
        let q = self.field().modulus() as u128;
        Ok(match self.challenge_space() {
            ChallengeSpace::Indices { .. } => Challenge::Index(ordinal as usize + 1),
            ChallengeSpace::Subsets { ell, .. } => Challenge::Subset(colex_unrank(ordinal, ell)),
            ChallengeSpace::NonzeroVectors { n } => {
                let mut digits = vec![0u64; n];
                let mut x = ordinal + 1;
                for d in digits.iter_mut().rev() {
                    *d = (x % q) as u64;
                    x /= q;
                }
                Challenge::Vector(FieldVector::from_values(self.field(), digits))
            }
            ChallengeSpace::WeightVectors { n, ell } => {
                Challenge::Vector(FieldVector::from_values(self.field(), weight_unrank(q, n, ell, ordinal)))
            }
        })
    }

    /// Position of `c` in the canonical order.
    pub fn ordinal_of(&self, c: &Challenge) -> Result<Ordinal> {
        self.validate_challenge(c)?;
        let q = self.field().modulus() as u128;
        Ok(match c {
            Challenge::Index(i) => *i as u128 - 1,
            Challenge::Subset(js) => js
                .iter()
                .enumerate()
                .map(|(j, &i)| binom_u128(i - 1, j + 1).unwrap_or(0))
                .sum(),
            Challenge::Vector(v) => match self.challenge_space() {
                ChallengeSpace::NonzeroVectors { .. } => {
                    v.values().iter().fold(0u128, |acc, &x| acc * q + x as u128) - 1
                }
                ChallengeSpace::WeightVectors { n, ell } => weight_rank(q, n, ell, v.values()),
                _ => unreachable!("validated"),
            },
        })
    }

    /// All challenges in canonical order.
    pub fn enumerate_challenges(&self) -> Result<impl Iterator<Item = Challenge> + '_> {
        let gamma = self.challenge_count()?;
        Ok((0..gamma).map(move |o| self.challenge_at(o).expect("ordinal below gamma")))
    }

    /// The authentic response `rho(M, c)`. For Shacham-Waters this is the `mu`
    /// component only; the full pair needs the tag (see `keyed::sw_respond`).
    pub fn respond(&self, m: &EncodedMessage, c: &Challenge) -> Result<Response> {
        self.validate_challenge(c)?;
        let blocks = m.blocks();
        if blocks.len() != self.n() {
            return Err(Error::LengthMismatch { left: self.n(), right: blocks.len() });
        }
        Ok(match c {
            Challenge::Index(i) => Response::Element(blocks.get(i - 1)),
            Challenge::Subset(js) => Response::Tuple(js.iter().map(|&j| blocks.get(j - 1)).collect()),
            Challenge::Vector(v) => Response::Element(v.dot(blocks)?),
        })
    }

    /// Keyless verification: component-wise equality with the stored response.
    pub fn verify_response(&self, stored: &Response, received: &Response) -> Result<bool> {
        if !stored.same_shape(received) {
            return Err(Error::ShapeMismatch);
        }
        Ok(stored == received)
    }

    /// `r^M = (rho(M, c) : c in Gamma)` in canonical order.
    pub fn response_vector(&self, m: &EncodedMessage, cap: u128) -> Result<Vec<Response>> {
        self.enumerable_gamma(cap)?;
        self.enumerate_challenges()?
            .map(|c| self.respond(m, &c))
            .collect()
    }

    /// Packs a response into a single comparable symbol of the response
    /// alphabet. Shacham-Waters pairs project to `mu`. Responses of the wrong
    /// shape map to a symbol no authentic response can take.
    pub fn symbol(&self, r: &Response) -> u64 {
        let q = self.field().modulus() as u128;
        let pack = |es: &[FieldElement]| -> u64 {
            let mut acc: u128 = 0;
            for e in es {
                acc = acc * q + e.value() as u128;
                if acc >= u64::MAX as u128 {
                    return u64::MAX;
                }
            }
            acc as u64
        };
        match (self.kind, r) {
            (SchemeKind::Multiblock, Response::Tuple(es)) if Some(es.len()) == self.ell => pack(es),
            (SchemeKind::ShachamWaters, Response::Pair { mu, .. }) => mu.value(),
            (SchemeKind::Multiblock, _) | (SchemeKind::ShachamWaters, Response::Tuple(_)) => u64::MAX,
            (_, Response::Element(e)) => e.value(),
            _ => u64::MAX,
        }
    }

    /// Builds the response code `R* = { r^M : M in M* }` indexed by message
    /// order, with its minimum distance computed by exhaustive pairwise search.
    pub fn build_response_code(&self, message_cap: u128, challenge_cap: u128) -> Result<ResponseCode> {
        let gamma = self.enumerable_gamma(challenge_cap)?;
        if let ChallengeSpace::Subsets { ell, .. } = self.challenge_space() {
            let q = self.field().modulus() as u128;
            if q.checked_pow(ell as u32).map_or(true, |x| x >= u64::MAX as u128) {
                return Err(too_large("response alphabet", format!("{q}^{ell}"), u64::MAX as u128));
            }
        }
        let count = match self.code.message_count() {
            Some(c) if c <= message_cap => c,
            c => {
                return Err(too_large(
                    "message space",
                    c.map_or_else(|| "more than 2^128".to_string(), |c| c.to_string()),
                    message_cap,
                ))
            }
        };
        let challenges: Vec<Challenge> = self.enumerate_challenges()?.collect();
        let mut codebook = Vec::with_capacity(count as usize);
        for codeword in self.code.codewords(message_cap)? {
            let row = challenges
                .iter()
                .map(|c| self.respond(&codeword, c).map(|r| self.symbol(&r)))
                .collect::<Result<Vec<u64>>>()?;
            codebook.push(row);
        }
        let mut dstar = usize::MAX;
        for i in 0..codebook.len() {
            for j in i + 1..codebook.len() {
                dstar = dstar.min(hamming(&codebook[i], &codebook[j]));
            }
        }
        Ok(ResponseCode {
            gamma: gamma as usize,
            codebook,
            dstar,
        })
    }

    /// [`build_response_code`](Self::build_response_code) with default caps.
    pub fn response_code(&self) -> Result<ResponseCode> {
        self.build_response_code(DEFAULT_RESPONSE_CODE_CAP, DEFAULT_CHALLENGE_CAP)
    }
}

/// The response code of a scheme: one symbol vector per encoded message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseCode {
    gamma: usize,
    codebook: Vec<Vec<u64>>,
    dstar: usize,
}

impl ResponseCode {
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// Rows in message-index order.
    pub fn codebook(&self) -> &[Vec<u64>] {
        &self.codebook
    }

    /// Minimum Hamming distance of the code.
    pub fn dstar(&self) -> usize {
        self.dstar
    }

    pub fn len(&self) -> usize {
        self.codebook.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codebook.is_empty()
    }
}

/// Flat `key=value` scheme configuration (`scheme`, `q`, `n`, `k`, `ell`,
/// `code-kind`, and `code-file` for matrix codes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeConfig {
    pub scheme: SchemeKind,
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub ell: Option<usize>,
    pub code_kind: CodeKind,
    pub code_file: Option<String>,
}

impl SchemeConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut scheme = None;
        let (mut q, mut n, mut k, mut ell) = (None, None, None, None);
        let mut code_kind = CodeKind::ReedSolomon;
        let mut code_file = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected key=value, found '{line}'")))?;
            let value = value.trim();
            match key.trim() {
                "scheme" => scheme = Some(value.parse()?),
                "q" => q = Some(parse_num(value)?),
                "n" => n = Some(parse_num(value)?),
                "k" => k = Some(parse_num(value)?),
                "ell" => ell = Some(parse_num::<usize>(value)?).filter(|&l| l != 0),
                "code-kind" => {
                    code_kind = match value {
                        "rs" => CodeKind::ReedSolomon,
                        "matrix" => CodeKind::Matrix,
                        other => return Err(Error::Format(format!("unknown code-kind '{other}'"))),
                    }
                }
                "code-file" => code_file = Some(value.to_string()),
                other => return Err(Error::Format(format!("unknown config key '{other}'"))),
            }
        }
        let missing = |k: &str| Error::Format(format!("config is missing '{k}'"));
        Ok(Self {
            scheme: scheme.ok_or_else(|| missing("scheme"))?,
            q: q.ok_or_else(|| missing("q"))?,
            n: n.ok_or_else(|| missing("n"))?,
            k: k.ok_or_else(|| missing("k"))?,
            ell,
            code_kind,
            code_file,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "scheme={}\nq={}\nn={}\nk={}\nell={}\ncode-kind={}\n",
            self.scheme,
            self.q,
            self.n,
            self.k,
            self.ell.unwrap_or(0),
            self.code_kind.as_str()
        );
        if let Some(f) = &self.code_file {
            s.push_str(&format!("code-file={f}\n"));
        }
        s
    }

    /// Builds the scheme. Matrix codes are read through `load_code`, which
    /// receives the `code-file` value.
    pub fn build_with(&self, load_code: impl FnOnce(&str) -> Result<String>) -> Result<Scheme> {
        let field = PrimeField::new(self.q)?;
        let code = match self.code_kind {
            CodeKind::ReedSolomon => rs_code(field, self.n, self.k)?,
            CodeKind::Matrix => {
                let path = self
                    .code_file
                    .as_deref()
                    .ok_or_else(|| Error::Format("matrix code needs code-file".into()))?;
                let code = LinearCode::from_description(&load_code(path)?)?;
                if code.field() != field || code.n() != self.n || code.k() != self.k {
                    return Err(Error::Format("code file disagrees with q/n/k".into()));
                }
                code
            }
        };
        Scheme::new(self.scheme, code, self.ell)
    }

    pub fn build(&self) -> Result<Scheme> {
        self.build_with(|path| std::fs::read_to_string(path).map_err(Error::from))
    }

    pub fn from_scheme(scheme: &Scheme) -> Self {
        Self {
            scheme: scheme.kind(),
            q: scheme.field().modulus(),
            n: scheme.n(),
            k: scheme.code().k(),
            ell: scheme.ell(),
            code_kind: scheme.code().kind(),
            code_file: None,
        }
    }
}

/// Exact `C(n, k)` in `u128`; `Some(0)` when `k > n`, `None` on overflow.
pub fn binom_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(len, w) (q-1)^w`: number of weight-`w` vectors of length `len`.
fn weight_count(q: u128, len: usize, w: usize) -> Option<u128> {
    binom_u128(len, w)?.checked_mul((q - 1).checked_pow(w as u32)?)
}

fn colex_unrank(mut rank: u128, ell: usize) -> Vec<usize> {
    let mut out = vec![0usize; ell];
    for j in (1..=ell).rev() {
        // largest c with C(c, j) <= rank
        let mut c = j - 1;
        while binom_u128(c + 1, j).is_some_and(|b| b <= rank) {
            c += 1;
        }
        rank -= binom_u128(c, j).unwrap_or(0);
        out[j - 1] = c + 1;
    }
    out
}

fn weight_unrank(q: u128, n: usize, ell: usize, mut ordinal: u128) -> Vec<u64> {
    let mut out = vec![0u64; n];
    let mut w = ell;
    for (i, slot) in out.iter_mut().enumerate() {
        if w == 0 {
            break;
        }
        let rest = n - i - 1;
        let zero_branch = weight_count(q, rest, w).unwrap_or(u128::MAX);
        if ordinal < zero_branch {
            continue;
        }
        ordinal -= zero_branch;
        let per_value = weight_count(q, rest, w - 1).expect("fits: bounded by gamma");
        *slot = (1 + ordinal / per_value) as u64;
        ordinal %= per_value;
        w -= 1;
    }
    out
}

fn weight_rank(q: u128, n: usize, ell: usize, values: &[u64]) -> u128 {
    let mut rank = 0u128;
    let mut w = ell;
    for (i, &v) in values.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let rest = n - i - 1;
        rank += weight_count(q, rest, w).unwrap_or(0);
        rank += (v as u128 - 1) * weight_count(q, rest, w - 1).unwrap_or(0);
        w -= 1;
    }
    rank
}
