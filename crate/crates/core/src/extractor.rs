//! Black-box extraction and a library of proving algorithms.
//!
//! The extractor queries a prover on every challenge in canonical order,
//! assembles the received response vector `R'` and decodes it to the
//! nearest vector of the response code.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::algebra::{FieldElement, FieldVector};
use crate::coding::{nearest_codeword, EncodedMessage};
use crate::error::{too_large, Error, Result};
use crate::keyed::{SwAttackProver, SwHonestProver, SwTag};
use crate::schemes::{Challenge, Ordinal, Response, ResponseCode, Scheme, SchemeKind, DEFAULT_CHALLENGE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProverKind {
    Honest,
    CorruptSet,
    Decoy,
    Random,
    SwAttack,
    Remote,
}

impl ProverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProverKind::Honest => "honest",
            ProverKind::CorruptSet => "corrupt-set",
            ProverKind::Decoy => "decoy",
            ProverKind::Random => "random",
            ProverKind::SwAttack => "sw-attack",
            ProverKind::Remote => "remote",
        }
    }
}

impl fmt::Display for ProverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A deterministic, total mapping from challenges to responses.
pub trait Prover {
    fn answer(&mut self, c: &Challenge) -> Result<Response>;
    fn kind(&self) -> ProverKind;
}

impl<P: Prover + ?Sized> Prover for Box<P> {
    fn answer(&mut self, c: &Challenge) -> Result<Response> {
        (**self).answer(c)
    }

    fn kind(&self) -> ProverKind {
        (**self).kind()
    }
}

/// Answers `rho(M, c)` everywhere.
#[derive(Debug, Clone)]
pub struct HonestProver {
    scheme: Scheme,
    m: EncodedMessage,
}

impl HonestProver {
    pub fn new(scheme: &Scheme, m: &EncodedMessage) -> Self {
        Self { scheme: scheme.clone(), m: m.clone() }
    }
}

impl Prover for HonestProver {
    fn answer(&mut self, c: &Challenge) -> Result<Response> {
        self.scheme.respond(&self.m, c)
    }

    fn kind(&self) -> ProverKind {
        ProverKind::Honest
    }
}

/// How a corrupting prover replaces an authentic response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrongValue {
    /// Authentic value plus one on the first component.
    PlusOne,
    /// A uniformly random response of the same shape, different from the
    /// authentic one; for keyed pairs `mu` differs and `tau` is random.
    Random { seed: u64 },
}

/// Wraps another prover and answers wrongly on a fixed set of ordinals.
pub struct CorruptingProver<P> {
    inner: P,
    scheme: Scheme,
    ordinals: BTreeSet<Ordinal>,
    rule: WrongValue,
    kind: ProverKind,
}

impl<P: Prover> CorruptingProver<P> {
    pub fn new(inner: P, scheme: &Scheme, ordinals: BTreeSet<Ordinal>, rule: WrongValue) -> Result<Self> {
        let gamma = scheme.challenge_count()?;
        if let Some(&o) = ordinals.iter().find(|&&o| o >= gamma) {
            return Err(Error::InvalidParams(format!("ordinal {o} is outside the challenge space (gamma={gamma})")));
        }
        let kind = match rule {
            WrongValue::PlusOne => ProverKind::CorruptSet,
            WrongValue::Random { .. } => ProverKind::Random,
        };
        Ok(Self {
            inner,
            scheme: scheme.clone(),
            ordinals,
            rule,
            kind,
        })
    }

    pub fn ordinals(&self) -> &BTreeSet<Ordinal> {
        &self.ordinals
    }
}

/// A response that differs from `authentic`, chosen by `rule` and keyed on
/// the challenge ordinal so that repeated queries agree.
pub fn wrong_response(authentic: &Response, rule: WrongValue, ordinal: Ordinal) -> Response {
    match rule {
        WrongValue::PlusOne => authentic.perturbed(),
        WrongValue::Random { seed } => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed ^ (ordinal as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let shift = |e: FieldElement, rng: &mut ChaCha20Rng| {
                let q = e.field().modulus();
                e.field().elem(e.value() + rng.gen_range(1..q))
            };
            let uniform = |e: FieldElement, rng: &mut ChaCha20Rng| e.field().elem(rng.gen_range(0..e.field().modulus()));
            match authentic {
                Response::Element(e) => Response::Element(shift(*e, &mut rng)),
                Response::Pair { mu, tau } => Response::Pair {
                    mu: shift(*mu, &mut rng),
                    tau: uniform(*tau, &mut rng),
                },
                Response::Tuple(es) => loop {
                    let out: Vec<_> = es.iter().map(|&e| uniform(e, &mut rng)).collect();
                    if out != *es {
                        break Response::Tuple(out);
                    }
                },
            }
        }
    }
}

impl<P: Prover> Prover for CorruptingProver<P> {
    fn answer(&mut self, c: &Challenge) -> Result<Response> {
        let authentic = self.inner.answer(c)?;
        let ordinal = self.scheme.ordinal_of(c)?;
        if self.ordinals.contains(&ordinal) {
            Ok(wrong_response(&authentic, self.rule, ordinal))
        } else {
            Ok(authentic)
        }
    }

    fn kind(&self) -> ProverKind {
        self.kind
    }
}

/// Answers as `M'` on a budgeted set of ordinals where `r^M` and `r^M'`
/// differ and as `M` elsewhere.
#[derive(Debug, Clone)]
pub struct DecoyProver {
    scheme: Scheme,
    m: EncodedMessage,
    decoy: EncodedMessage,
    ordinals: BTreeSet<Ordinal>,
}

impl DecoyProver {
    /// The budgeted ordinals are drawn by a seeded generator from the
    /// disagreement set.
    pub fn new(scheme: &Scheme, m: &EncodedMessage, decoy: &EncodedMessage, budget: usize, seed: u64) -> Result<Self> {
        if decoy == m {
            return Err(Error::InvalidParams("decoy must differ from the stored message".into()));
        }
        scheme.code().decode_unencode(decoy.blocks())?;
        let disagreements = disagreement_ordinals(scheme, m, decoy)?;
        if budget > disagreements.len() {
            return Err(Error::InvalidParams(format!(
                "budget {budget} exceeds the {} coordinates where the response vectors differ",
                disagreements.len()
            )));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let ordinals = sample(&mut rng, disagreements.len(), budget)
            .into_iter()
            .map(|i| disagreements[i])
            .collect();
        Ok(Self {
            scheme: scheme.clone(),
            m: m.clone(),
            decoy: decoy.clone(),
            ordinals,
        })
    }

    pub fn ordinals(&self) -> &BTreeSet<Ordinal> {
        &self.ordinals
    }
}

/// Ordinals at which the response vectors of `a` and `b` differ.
pub fn disagreement_ordinals(scheme: &Scheme, a: &EncodedMessage, b: &EncodedMessage) -> Result<Vec<Ordinal>> {
    let gamma = scheme.challenge_count()?;
    if gamma > DEFAULT_CHALLENGE_CAP {
        return Err(too_large("challenge space", gamma, DEFAULT_CHALLENGE_CAP));
    }
    let mut out = Vec::new();
    for (o, c) in scheme.enumerate_challenges()?.enumerate() {
        if scheme.respond(a, &c)? != scheme.respond(b, &c)? {
            out.push(o as Ordinal);
        }
    }
    Ok(out)
}

impl Prover for DecoyProver {
    fn answer(&mut self, c: &Challenge) -> Result<Response> {
        let ordinal = self.scheme.ordinal_of(c)?;
        let source = if self.ordinals.contains(&ordinal) { &self.decoy } else { &self.m };
        self.scheme.respond(source, c)
    }

    fn kind(&self) -> ProverKind {
        ProverKind::Decoy
    }
}

/// Textual prover description used by the CLI and the server fault plug-in.
///
/// * `honest`
/// * `corrupt:<o1>,<o2>,...` wrong (authentic + 1) on the listed 0-based ordinals
/// * `rate:<p>[:<seed>]` random wrong values on a seeded random fraction `p` of Γ
/// * `decoy:<message-index>:<budget>[:<seed>]`
/// * `sw-attack` key recovery through a verification oracle (keyed scheme only)
#[derive(Debug, Clone, PartialEq)]
pub enum ProverSpec {
    Honest,
    Corrupt(BTreeSet<Ordinal>),
    Rate { p: f64, seed: u64 },
    Decoy { message_index: u128, budget: usize, seed: u64 },
    SwAttack,
}

impl FromStr for ProverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unrecognised prover spec '{s}'"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| x.trim().parse::<u128>().map_err(|_| bad());
        Ok(match parts.as_slice() {
            ["honest"] => ProverSpec::Honest,
            ["sw-attack"] => ProverSpec::SwAttack,
            ["corrupt"] => ProverSpec::Corrupt(BTreeSet::new()),
            ["corrupt", list] => ProverSpec::Corrupt(
                list.split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(num)
                    .collect::<Result<_>>()?,
            ),
            ["rate", p, rest @ ..] if rest.len() <= 1 => {
                let p: f64 = p.trim().parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParams(format!("rate {p} is not in [0, 1]")));
                }
                let seed = rest.first().map(|x| num(x)).transpose()?.unwrap_or(0) as u64;
                ProverSpec::Rate { p, seed }
            }
            ["decoy", idx, budget, rest @ ..] if rest.len() <= 1 => ProverSpec::Decoy {
                message_index: num(idx)?,
                budget: num(budget)? as usize,
                seed: rest.first().map(|x| num(x)).transpose()?.unwrap_or(0) as u64,
            },
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for ProverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProverSpec::Honest => f.write_str("honest"),
            ProverSpec::SwAttack => f.write_str("sw-attack"),
            ProverSpec::Corrupt(os) => {
                let list: Vec<String> = os.iter().map(|o| o.to_string()).collect();
                write!(f, "corrupt:{}", list.join(","))
            }
            ProverSpec::Rate { p, seed } => write!(f, "rate:{p}:{seed}"),
            ProverSpec::Decoy { message_index, budget, seed } => write!(f, "decoy:{message_index}:{budget}:{seed}"),
        }
    }
}

/// Seeded selection of `round(p * gamma)` ordinals.
pub fn rate_ordinals(gamma: u128, p: f64, seed: u64) -> Result<BTreeSet<Ordinal>> {
    if gamma > DEFAULT_CHALLENGE_CAP {
        return Err(too_large("challenge space", gamma, DEFAULT_CHALLENGE_CAP));
    }
    let count = ((gamma as f64) * p).round() as usize;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok(sample(&mut rng, gamma as usize, count.min(gamma as usize))
        .into_iter()
        .map(|i| i as Ordinal)
        .collect())
}

/// Builds a proving algorithm for `M`. Keyed schemes need the tag `S`;
/// the oracle attack is built from [`crate::keyed::sw_oracle_attack`] and
/// passed in as `attack`.
pub fn make_prover(
    spec: &ProverSpec,
    scheme: &Scheme,
    m: &EncodedMessage,
    tag: Option<&SwTag>,
    attack: Option<SwAttackProver>,
) -> Result<Box<dyn Prover>> {
    let keyed = scheme.kind() == SchemeKind::ShachamWaters;
    let base = || -> Result<Box<dyn Prover>> {
        if keyed {
            let tag = tag.ok_or_else(|| Error::InvalidParams("keyed scheme needs the tag".into()))?;
            Ok(Box::new(SwHonestProver::new(m, tag)))
        } else {
            Ok(Box::new(HonestProver::new(scheme, m)))
        }
    };
    Ok(match spec {
        ProverSpec::Honest => base()?,
        ProverSpec::Corrupt(os) => Box::new(CorruptingProver::new(base()?, scheme, os.clone(), WrongValue::PlusOne)?),
        ProverSpec::Rate { p, seed } => {
            let os = rate_ordinals(scheme.challenge_count()?, *p, *seed)?;
            Box::new(CorruptingProver::new(base()?, scheme, os, WrongValue::Random { seed: *seed })?)
        }
        ProverSpec::Decoy { message_index, budget, seed } => {
            if keyed {
                return Err(Error::InvalidParams("decoy prover applies to keyless schemes".into()));
            }
            let code = scheme.code();
            if code.message_count().is_some_and(|c| *message_index >= c) {
                return Err(Error::InvalidParams(format!("message index {message_index} out of range")));
            }
            let decoy = code.encode(&code.message_at(*message_index))?;
            Box::new(DecoyProver::new(scheme, m, &decoy, *budget, *seed)?)
        }
        ProverSpec::SwAttack => {
            if !keyed {
                return Err(Error::InvalidParams("sw-attack applies to the keyed scheme".into()));
            }
            Box::new(attack.ok_or_else(|| Error::InvalidParams("sw-attack needs a recovered key".into()))?)
        }
    })
}

fn enumerable(scheme: &Scheme) -> Result<u128> {
    let gamma = scheme.challenge_count()?;
    if gamma > DEFAULT_CHALLENGE_CAP {
        return Err(too_large("challenge space", gamma, DEFAULT_CHALLENGE_CAP));
    }
    Ok(gamma)
}

/// Exact `succ(P)`: the fraction of challenges answered authentically.
/// Keyed schemes use [`crate::keyed::sw_succ_avg`] instead.
pub fn succ_exact(prover: &mut dyn Prover, scheme: &Scheme, m: &EncodedMessage) -> Result<BigRational> {
    if scheme.kind() == SchemeKind::ShachamWaters {
        return Err(Error::Parameter("keyed scheme success is measured by sw_succ_avg".into()));
    }
    let gamma = enumerable(scheme)?;
    let mut good: u128 = 0;
    for c in scheme.enumerate_challenges()? {
        let r = prover.answer(&c)?;
        if r == scheme.respond(m, &c)? {
            good += 1;
        }
    }
    Ok(BigRational::new(BigInt::from(good), BigInt::from(gamma)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionResult {
    pub m_hat: FieldVector,
    pub codeword: EncodedMessage,
    pub distance: usize,
    pub tie: bool,
    pub queries: usize,
}

/// Queries `prover` on all of Γ and returns `R'` as response symbols.
pub fn received_vector(prover: &mut dyn Prover, scheme: &Scheme) -> Result<Vec<u64>> {
    enumerable(scheme)?;
    scheme
        .enumerate_challenges()?
        .map(|c| prover.answer(&c).map(|r| scheme.symbol(&r)))
        .collect()
}

/// Decodes an already collected `R'` against `code`.
pub fn decode_received(scheme: &Scheme, code: &ResponseCode, received: &[u64]) -> Result<ExtractionResult> {
    let nearest = nearest_codeword(received, code.codebook())?;
    let lc = scheme.code();
    let m_hat = lc.message_at(nearest.index as u128);
    let codeword = lc.encode(&m_hat)?;
    Ok(ExtractionResult {
        m_hat,
        codeword,
        distance: nearest.distance,
        tie: nearest.tie,
        queries: received.len(),
    })
}

/// Extraction against a prebuilt response code.
pub fn extract_with(prover: &mut dyn Prover, scheme: &Scheme, code: &ResponseCode) -> Result<ExtractionResult> {
    let received = received_vector(prover, scheme)?;
    decode_received(scheme, code, &received)
}

/// Queries every challenge once and decodes `R'` to the nearest `r^M`.
pub fn extract(prover: &mut dyn Prover, scheme: &Scheme) -> Result<ExtractionResult> {
    let code = scheme.response_code()?;
    extract_with(prover, scheme, &code)
}

/// Keyed extraction: only the `mu` component of each response is used.
pub fn sw_extract(prover: &mut dyn Prover, scheme: &Scheme) -> Result<ExtractionResult> {
    crate::keyed::require_keyed(scheme)?;
    extract(prover, scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use crate::coding::{rs_code, LinearCode};
    use crate::keyed::{sw_keygen, sw_oracle_attack, sw_succ_avg, sw_tag, sw_verify, OracleAttackMode};
    use num_traits::{One, ToPrimitive};

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn rs(q: u64, n: usize, k: usize) -> LinearCode {
        rs_code(f(q), n, k).unwrap()
    }

    fn msg(code: &LinearCode, xs: &[u64]) -> EncodedMessage {
        code.encode(&FieldVector::from_values(code.field(), xs.iter().copied())).unwrap()
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn honest_succ_is_one_and_extracts() {
        let code = rs(5, 4, 2);
        let scheme = Scheme::new(SchemeKind::Basic, code.clone(), None).unwrap();
        let m = msg(&code, &[3, 1]);
        let mut p = HonestProver::new(&scheme, &m);
        assert!(succ_exact(&mut p, &scheme, &m).unwrap().is_one());
        let r = extract(&mut p, &scheme).unwrap();
        assert_eq!(r.m_hat.values(), &[3, 1]);
        assert_eq!((r.distance, r.tie, r.queries), (0, false, 4));
        assert_eq!(r.codeword, m);
    }

    #[test]
    fn corrupt_set_counts() {
        let code = rs(5, 4, 2);
        let basic = Scheme::new(SchemeKind::Basic, code.clone(), None).unwrap();
        let m = msg(&code, &[2, 4]);
        let spec: ProverSpec = "corrupt:2".parse().unwrap();
        let mut p = make_prover(&spec, &basic, &m, None, None).unwrap();
        assert_eq!(succ_exact(&mut p, &basic, &m).unwrap(), ratio(3, 4));
        // 0.75 > 1 - 3/8
        assert_eq!(extract(&mut p, &basic).unwrap().m_hat.values(), &[2, 4]);

        let mb = Scheme::new(SchemeKind::Multiblock, code.clone(), Some(2)).unwrap();
        let mut p = make_prover(&"corrupt:0,5".parse().unwrap(), &mb, &m, None, None).unwrap();
        assert_eq!(succ_exact(&mut p, &mb, &m).unwrap(), ratio(4, 6));
        assert!(make_prover(&"corrupt:6".parse().unwrap(), &mb, &m, None, None).is_err());
    }

    #[test]
    fn decoy_prover_construction() {
        let code = rs(5, 4, 2);
        let basic = Scheme::new(SchemeKind::Basic, code.clone(), None).unwrap();
        let m = msg(&code, &[0, 0]);
        // M' = encode(1, 0) = (1,1,1,1): distance 4 from M.
        let decoy = msg(&code, &[1, 0]);
        let dis = disagreement_ordinals(&basic, &m, &decoy).unwrap();
        let mut p = DecoyProver::new(&basic, &m, &decoy, dis.len(), 3).unwrap();
        for c in basic.enumerate_challenges().unwrap() {
            assert_eq!(p.answer(&c).unwrap(), basic.respond(&decoy, &c).unwrap());
        }
        assert!(DecoyProver::new(&basic, &m, &m, 0, 0).is_err());
        assert!(DecoyProver::new(&basic, &m, &decoy, dis.len() + 1, 0).is_err());

        let mut p = DecoyProver::new(&basic, &m, &decoy, 1, 9).unwrap();
        assert_eq!(succ_exact(&mut p, &basic, &m).unwrap(), ratio(3, 4));
    }

    #[test]
    fn decoy_below_threshold_misleads_extractor() {
        let code = rs(5, 4, 2);
        let basic = Scheme::new(SchemeKind::Basic, code.clone(), None).unwrap();
        let m = msg(&code, &[0, 0]);
        // A codeword at distance exactly 3 from M.
        let decoy = code
            .codewords(1 << 10)
            .unwrap()
            .find(|c| c.blocks().weight() == 3)
            .unwrap();
        for seed in 0..10 {
            let mut p = DecoyProver::new(&basic, &m, &decoy, 2, seed).unwrap();
            assert_eq!(succ_exact(&mut p, &basic, &m).unwrap(), ratio(1, 2));
            let r = extract(&mut p, &basic).unwrap();
            assert_eq!(r.codeword, decoy);
            assert_eq!(r.distance, 1);
            assert_ne!(r.m_hat, code.decode_unencode(m.blocks()).unwrap());
        }
    }

    #[test]
    fn prover_spec_round_trip() {
        for s in ["honest", "corrupt:1,3", "rate:0.25:7", "decoy:3:2:1", "sw-attack"] {
            let spec: ProverSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<ProverSpec>().unwrap(), spec);
        }
        assert!("rate:2".parse::<ProverSpec>().is_err());
        assert!("bogus".parse::<ProverSpec>().is_err());
    }

    #[test]
    fn wrong_response_never_authentic() {
        let code = rs(3, 3, 2);
        let mb = Scheme::new(SchemeKind::Multiblock, code.clone(), Some(2)).unwrap();
        let m = msg(&code, &[1, 2]);
        for (o, c) in mb.enumerate_challenges().unwrap().enumerate() {
            let a = mb.respond(&m, &c).unwrap();
            for seed in 0..20 {
                let w = wrong_response(&a, WrongValue::Random { seed }, o as u128);
                assert_ne!(w, a);
                assert_eq!(w, wrong_response(&a, WrongValue::Random { seed }, o as u128));
            }
        }
    }

    #[test]
    fn sw_extraction_and_attack() {
        let code = rs(5, 4, 2);
        let scheme = Scheme::new(SchemeKind::ShachamWaters, code.clone(), Some(2)).unwrap();
        let m = msg(&code, &[4, 1]);
        let key = sw_keygen(code.field(), 4, 5);
        let s = sw_tag(&key, m.blocks()).unwrap();
        let mut honest = make_prover(&ProverSpec::Honest, &scheme, &m, Some(&s), None).unwrap();
        assert!(sw_succ_avg(&mut honest, &scheme, &m, &s, 1 << 20).unwrap().is_one());
        assert_eq!(sw_extract(&mut honest, &scheme).unwrap().codeword, m);

        let mut oracle = |v: &FieldVector, r: &crate::keyed::SwResponse| sw_verify(&key, v, r).unwrap();
        let attack = sw_oracle_attack(&scheme, &m, &s, OracleAttackMode::InferLast, &mut oracle).unwrap();
        let mut p = make_prover(&ProverSpec::SwAttack, &scheme, &m, Some(&s), Some(attack.prover())).unwrap();
        let r = sw_extract(&mut p, &scheme).unwrap();
        assert_eq!(r.codeword, attack.decoy);
        assert_eq!(r.distance, 0);
        assert_ne!(r.codeword, m);
    }

    #[test]
    fn sw_rate_prover_succ_avg_matches_count() {
        let code = rs(5, 4, 2);
        let scheme = Scheme::new(SchemeKind::ShachamWaters, code.clone(), Some(2)).unwrap();
        let m = msg(&code, &[1, 3]);
        let key = sw_keygen(code.field(), 4, 1);
        let s = sw_tag(&key, m.blocks()).unwrap();
        let gamma = scheme.challenge_count().unwrap() as f64;
        let mut p = make_prover(&"rate:0.1:4".parse().unwrap(), &scheme, &m, Some(&s), None).unwrap();
        let succ = sw_succ_avg(&mut p, &scheme, &m, &s, 1 << 20).unwrap().to_f64().unwrap();
        let c = (gamma * 0.1).round();
        // each corrupted challenge contributes at most one acceptable key of q
        assert!(succ <= 1.0 - c * 4.0 / (gamma * 5.0) + 1e-12);
        assert!(succ >= 1.0 - c / gamma - 1e-12);
    }
}
