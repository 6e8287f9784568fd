//! Keyed scheme with an information-theoretic authenticator.
//!
//! The verifier keeps `K = (alpha, B)` with `alpha` and every `beta_i`
//! uniform in `F_q`. The prover stores `M` and the tag `S = B + alpha M` and
//! answers a challenge `V` with `(mu, tau) = (V . M, V . S)`. A response is
//! acceptable for `K` when `tau = alpha mu + V . B`.
//!
//! From the prover's view `(M, S)` exactly `q` keys remain possible, one per
//! value of `alpha`. A non-authentic response is acceptable for at most one
//! of them, which is what bounds the average success probability and also
//! what lets a prover holding a verification oracle recover the key.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::algebra::{FieldElement, FieldVector, PrimeField};
use crate::coding::EncodedMessage;
use crate::error::{Error, Result};
use crate::extractor::{Prover, ProverKind};
use crate::schemes::{Challenge, Response, Scheme, SchemeKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwKey {
    pub alpha: FieldElement,
    pub beta: FieldVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwTag {
    pub sigma: FieldVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwResponse {
    pub mu: FieldElement,
    pub tau: FieldElement,
}

impl From<SwResponse> for Response {
    fn from(r: SwResponse) -> Self {
        Response::Pair { mu: r.mu, tau: r.tau }
    }
}

impl SwResponse {
    pub fn from_response(r: &Response) -> Option<Self> {
        match r {
            Response::Pair { mu, tau } => Some(Self { mu: *mu, tau: *tau }),
            _ => None,
        }
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Draws `alpha` and `B` uniformly from a seeded ChaCha20 stream.
pub fn sw_keygen(field: PrimeField, n: usize, seed: u64) -> SwKey {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let q = field.modulus();
    let alpha = field.elem(rng.gen_range(0..q));
    let beta = FieldVector::from_values(field, (0..n).map(|_| rng.gen_range(0..q)).collect::<Vec<_>>());
    SwKey { alpha, beta }
}

/// `S = B + alpha M`.
pub fn sw_tag(key: &SwKey, m: &FieldVector) -> Result<SwTag> {
    check_len(key.beta.len(), m.len())?;
    let sigma = key.beta.try_add(&m.scale(key.alpha)?)?;
    Ok(SwTag { sigma })
}

/// The authentic response `(V . M, V . S)`.
pub fn sw_respond(m: &FieldVector, s: &SwTag, v: &FieldVector) -> Result<SwResponse> {
    check_len(m.len(), v.len())?;
    check_len(s.sigma.len(), v.len())?;
    Ok(SwResponse {
        mu: v.dot(m)?,
        tau: v.dot(&s.sigma)?,
    })
}

/// Checks `tau = alpha mu + V . B`.
pub fn sw_verify(key: &SwKey, v: &FieldVector, r: &SwResponse) -> Result<bool> {
    check_len(key.beta.len(), v.len())?;
    let expected = key.alpha.try_mul(r.mu)?.try_add(v.dot(&key.beta)?)?;
    Ok(expected == r.tau)
}

/// `Possible(M, S) = { (a, S - a M) : a in F_q }`, ordered by `a`.
pub fn sw_possible_keys(m: &FieldVector, s: &SwTag) -> Result<Vec<SwKey>> {
    check_len(m.len(), s.sigma.len())?;
    m.field()
        .elements()
        .map(|a| {
            Ok(SwKey {
                alpha: a,
                beta: s.sigma.try_sub(&m.scale(a)?)?,
            })
        })
        .collect()
}

/// Whether `r` equals the honest response to `V`.
pub fn sw_is_authentic(m: &FieldVector, s: &SwTag, v: &FieldVector, r: &SwResponse) -> Result<bool> {
    Ok(sw_respond(m, s, v)? == *r)
}

/// Number of keys in `Possible(M, S)` under which `r` is acceptable.
pub fn sw_acceptable_key_count(m: &FieldVector, s: &SwTag, v: &FieldVector, r: &SwResponse) -> Result<u64> {
    let mut count = 0;
    for key in sw_possible_keys(m, s)? {
        if sw_verify(&key, v, r)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Exact average success probability: the fraction of pairs `(V, K)` with
/// `V` in `Gamma` and `K` in `Possible(M, S)` for which `P(V)` is acceptable.
pub fn sw_succ_avg(
    prover: &mut dyn Prover,
    scheme: &Scheme,
    m: &EncodedMessage,
    s: &SwTag,
    challenge_cap: u128,
) -> Result<BigRational> {
    let gamma = scheme.challenge_count()?;
    if gamma > challenge_cap {
        return Err(crate::error::too_large("challenge space", gamma, challenge_cap));
    }
    let keys = sw_possible_keys(m.blocks(), s)?;
    let mut accepted: u128 = 0;
    for c in scheme.enumerate_challenges()? {
        let Challenge::Vector(v) = &c else {
            return Err(Error::InvalidChallenge("keyed scheme needs vector challenges".into()));
        };
        let Some(r) = SwResponse::from_response(&prover.answer(&c)?) else {
            continue;
        };
        for key in &keys {
            if sw_verify(key, v, &r)? {
                accepted += 1;
            }
        }
    }
    let q = scheme.field().modulus() as u128;
    Ok(BigRational::new(BigInt::from(accepted), BigInt::from(gamma) * BigInt::from(q)))
}

/// How the key-recovery attack treats the last remaining candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleAttackMode {
    /// After `q - 1` rejections the last candidate is taken without a query.
    InferLast,
    /// Every candidate is queried; an oracle that accepts none is reported.
    ConfirmAll,
}

#[derive(Debug, Clone)]
pub struct OracleAttack {
    pub key: SwKey,
    pub queries: usize,
    pub decoy: EncodedMessage,
}

impl OracleAttack {
    /// Proving algorithm that answers every challenge with an acceptable,
    /// non-authentic response built from the decoy codeword.
    pub fn prover(&self) -> SwAttackProver {
        SwAttackProver {
            key: self.key.clone(),
            decoy: self.decoy.clone(),
        }
    }
}

/// Key recovery using a verification oracle.
///
/// For each candidate `a` the attack submits, for the probe challenge `V`
/// (the first challenge in canonical order), the forged response
/// `mu = V . M + 1`, `tau = a mu + V . (S - a M)`, which is acceptable under
/// candidate `a` and no other possible key. The decoy is the codeword whose
/// message index follows that of `M`.
///
/// In [`OracleAttackMode::ConfirmAll`] the recovered key is then checked with
/// a forged response on every other challenge, so an oracle whose key lies
/// outside `Possible(M, S)` is reported.
pub fn sw_oracle_attack(
    scheme: &Scheme,
    m: &EncodedMessage,
    s: &SwTag,
    mode: OracleAttackMode,
    oracle: &mut dyn FnMut(&FieldVector, &SwResponse) -> bool,
) -> Result<OracleAttack> {
    require_keyed(scheme)?;
    let code = scheme.code();
    let blocks = m.blocks();
    check_len(blocks.len(), scheme.n())?;
    let candidates = sw_possible_keys(blocks, s)?;
    let forge = |key: &SwKey, v: &FieldVector| -> Result<SwResponse> {
        let mu = v.field().elem(v.dot(blocks)?.value() + 1);
        let tau = key.alpha.try_mul(mu)?.try_add(v.dot(&key.beta)?)?;
        Ok(SwResponse { mu, tau })
    };
    let vector = |c: Challenge| match c {
        Challenge::Vector(v) => Ok(v),
        _ => Err(Error::InvalidChallenge("keyed scheme needs vector challenges".into())),
    };
    let probe = vector(scheme.challenge_at(0)?)?;
    let mut queries = 0;
    let mut found = None;
    for (i, key) in candidates.iter().enumerate() {
        if mode == OracleAttackMode::InferLast && i + 1 == candidates.len() {
            found = Some(key.clone());
            break;
        }
        queries += 1;
        if oracle(&probe, &forge(key, &probe)?) {
            found = Some(key.clone());
            break;
        }
    }
    let key = found.ok_or(Error::OracleInconsistent)?;
    if mode == OracleAttackMode::ConfirmAll {
        for c in scheme.enumerate_challenges()?.skip(1) {
            let v = vector(c)?;
            queries += 1;
            if !oracle(&v, &forge(&key, &v)?) {
                return Err(Error::OracleInconsistent);
            }
        }
    }

    let message = code.decode_unencode(blocks)?;
    let count = code
        .message_count()
        .ok_or_else(|| Error::Parameter("message space too large".into()))?;
    let next = (code.message_index(&message) + 1) % count;
    let decoy = code.encode(&code.message_at(next))?;
    Ok(OracleAttack { key, queries, decoy })
}

/// The proving algorithm produced by [`sw_oracle_attack`].
#[derive(Debug, Clone)]
pub struct SwAttackProver {
    key: SwKey,
    decoy: EncodedMessage,
}

impl SwAttackProver {
    pub fn decoy(&self) -> &EncodedMessage {
        &self.decoy
    }
}

impl Prover for SwAttackProver {
    fn answer(&mut self, c: &Challenge) -> Result<Response> {
        let Challenge::Vector(v) = c else {
            return Err(Error::InvalidChallenge("keyed scheme needs vector challenges".into()));
        };
        let mu = v.dot(self.decoy.blocks())?;
        let tau = self.key.alpha.try_mul(mu)?.try_add(v.dot(&self.key.beta)?)?;
        Ok(Response::Pair { mu, tau })
    }

    fn kind(&self) -> ProverKind {
        ProverKind::SwAttack
    }
}

/// Honest keyed prover holding `(M, S)`.
#[derive(Debug, Clone)]
pub struct SwHonestProver {
    m: FieldVector,
    s: SwTag,
}

impl SwHonestProver {
    pub fn new(m: &EncodedMessage, s: &SwTag) -> Self {
        Self {
            m: m.blocks().clone(),
            s: s.clone(),
        }
    }
}

impl Prover for SwHonestProver {
    fn answer(&mut self, c: &Challenge) -> Result<Response> {
        let Challenge::Vector(v) = c else {
            return Err(Error::InvalidChallenge("keyed scheme needs vector challenges".into()));
        };
        Ok(sw_respond(&self.m, &self.s, v)?.into())
    }

    fn kind(&self) -> ProverKind {
        ProverKind::Honest
    }
}

/// Checks that `scheme` is the keyed kind.
pub fn require_keyed(scheme: &Scheme) -> Result<()> {
    if scheme.kind() != SchemeKind::ShachamWaters {
        return Err(Error::Parameter(format!("scheme {} is not keyed", scheme.kind())));
    }
    Ok(())
}

fn hex_list(v: &FieldVector) -> String {
    v.values().iter().map(|x| format!("{x:x}")).collect::<Vec<_>>().join(" ")
}

fn parse_hex(s: &str) -> Result<u64> {
    u64::from_str_radix(s.trim(), 16).map_err(|_| Error::Format(format!("bad hex value '{s}'")))
}

struct Header {
    field: PrimeField,
    n: usize,
    entries: Vec<(String, String)>,
}

fn parse_header(text: &str) -> Result<Header> {
    let mut q = None;
    let mut n = None;
    let mut entries = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected key=value, found '{line}'")))?;
        match k.trim() {
            "q" => q = Some(crate::coding::parse_num::<u64>(v)?),
            "n" => n = Some(crate::coding::parse_num::<usize>(v)?),
            other => entries.push((other.to_string(), v.trim().to_string())),
        }
    }
    let field = PrimeField::new(q.ok_or_else(|| Error::Format("missing q".into()))?)?;
    let n = n.ok_or_else(|| Error::Format("missing n".into()))?;
    Ok(Header { field, n, entries })
}

fn hex_vector(field: PrimeField, n: usize, text: &str) -> Result<FieldVector> {
    let values = text.split_whitespace().map(parse_hex).collect::<Result<Vec<_>>>()?;
    if values.len() != n {
        return Err(Error::Format(format!("expected {n} values, found {}", values.len())));
    }
    FieldVector::from_canonical(field, values)
}

impl SwKey {
    /// Key store text: `q=`, `n=`, `alpha=<hex>`, `beta=<hex list>`.
    pub fn to_text(&self) -> String {
        format!(
            "q={}\nn={}\nalpha={:x}\nbeta={}\n",
            self.beta.field().modulus(),
            self.beta.len(),
            self.alpha.value(),
            hex_list(&self.beta)
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let h = parse_header(text)?;
        let get = |key: &str| {
            h.entries
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Format(format!("missing {key}")))
        };
        let alpha = h.field.canonical(parse_hex(get("alpha")?)?)?;
        let beta = hex_vector(h.field, h.n, get("beta")?)?;
        Ok(Self { alpha, beta })
    }
}

impl SwTag {
    /// Tag file text: `q=`, `n=`, `sigma=<hex list>`.
    pub fn to_text(&self) -> String {
        format!(
            "q={}\nn={}\nsigma={}\n",
            self.sigma.field().modulus(),
            self.sigma.len(),
            hex_list(&self.sigma)
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let h = parse_header(text)?;
        let sigma = h
            .entries
            .iter()
            .find(|(k, _)| k == "sigma")
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Format("missing sigma".into()))?;
        Ok(Self {
            sigma: hex_vector(h.field, h.n, sigma)?,
        })
    }
}
