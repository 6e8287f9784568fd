use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufReader;
use std::net::{SocketAddr, TcpStream, ToSocketAddrs};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::analysis::threshold;
use crate::audit::{audit_decision, omega_from_threshold, AuditReport, AuditSample, Sampling};
use crate::coding::{EncodedMessage, DEFAULT_CODEWORD_CAP};
use crate::error::{Error, Result};
use crate::extractor::{Prover, ProverKind};
use crate::keyed::{sw_verify, SwKey, SwResponse};
use crate::schemes::{Challenge, Ordinal, Response, Scheme, SchemeConfig, SchemeKind};

use super::protocol::{decode_response, encode_challenge, read_frame, write_frame, Frame, FrameType, Hello};
use super::store::PairStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToProver,
    ToVerifier,
}

/// Every frame of a session in the order it crossed the wire.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub frames: Vec<(Direction, Frame)>,
}

impl Transcript {
    /// Concatenated wire bytes in both directions.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.frames.iter().flat_map(|(_, f)| f.to_bytes()).collect()
    }

    /// One line per frame: `>` for verifier-to-prover, `<` for the reverse.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (dir, f) in &self.frames {
            let arrow = match dir {
                Direction::ToProver => '>',
                Direction::ToVerifier => '<',
            };
            let hex: String = f.to_bytes().iter().map(|b| format!("{b:02x}")).collect();
            s.push_str(&format!("{arrow} {hex}\n"));
        }
        s
    }

    /// Checks that the verifier never sends anything to the prover except the
    /// opening HELLO and challenges, so no accept/reject signal leaks.
    pub fn check_no_feedback(&self) -> Result<()> {
        let mut sent = self.frames.iter().filter(|(d, _)| *d == Direction::ToProver).enumerate();
        let bad = |i: usize, what: &str| Err(Error::Protocol(format!("verifier frame {i} is {what}")));
        for (i, (_, f)) in &mut sent {
            match (i, f.kind) {
                (0, FrameType::Hello) | (1.., FrameType::Challenge) => {}
                (0, _) => return bad(0, "not HELLO"),
                (_, k) => return bad(i, &format!("{k:?} rather than CHALLENGE")),
            }
        }
        // after a RESPONSE only the next CHALLENGE (or close) may follow
        for w in self.frames.windows(2) {
            if let [(Direction::ToVerifier, a), (Direction::ToProver, b)] = w {
                if a.kind == FrameType::Response && b.kind != FrameType::Challenge {
                    return Err(Error::Protocol("verifier sent a non-challenge frame after a response".into()));
                }
            }
        }
        Ok(())
    }
}

/// One verifier session: HELLO exchange followed by sequential challenges.
pub struct Session {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    scheme: Scheme,
    transcript: Transcript,
    answered: usize,
}

impl Session {
    pub fn connect(addr: impl ToSocketAddrs, scheme: &Scheme) -> Result<Self> {
        let conn = |e: std::io::Error| Error::Connection { message: e.to_string(), answered: 0 };
        let stream = TcpStream::connect(addr).map_err(conn)?;
        stream.set_nodelay(true).map_err(conn)?;
        let mut session = Self {
            reader: BufReader::new(stream.try_clone().map_err(conn)?),
            writer: stream,
            scheme: scheme.clone(),
            transcript: Transcript::default(),
            answered: 0,
        };
        let ours = Hello::for_scheme(scheme);
        let reply = session.exchange(ours.frame())?;
        match reply.kind {
            FrameType::Hello if Hello::decode(&reply.payload)? == ours => Ok(session),
            FrameType::Hello => Err(Error::Protocol("server answered HELLO with different parameters".into())),
            _ => Err(Error::Protocol(format!("unexpected {:?} frame during handshake", reply.kind))),
        }
    }

    fn exchange(&mut self, frame: Frame) -> Result<Frame> {
        let answered = self.answered;
        let conn = |message: String| Error::Connection { message, answered };
        write_frame(&mut self.writer, &frame).map_err(|e| conn(e.to_string()))?;
        self.transcript.frames.push((Direction::ToProver, frame));
        let reply = match read_frame(&mut self.reader) {
            Ok(Some(f)) => f,
            Ok(None) => return Err(conn("server closed the connection".into())),
            Err(Error::Io(m)) => return Err(conn(m)),
            Err(e) => return Err(e),
        };
        self.transcript.frames.push((Direction::ToVerifier, reply.clone()));
        if let Some((code, message)) = reply.error_parts() {
            return Err(Error::Remote { code, message });
        }
        Ok(reply)
    }

    pub fn query(&mut self, c: &Challenge) -> Result<Response> {
        let payload = encode_challenge(&self.scheme, c)?;
        let reply = self.exchange(Frame::new(FrameType::Challenge, payload))?;
        if reply.kind != FrameType::Response {
            return Err(Error::Protocol(format!("expected RESPONSE, got {:?}", reply.kind)));
        }
        let r = decode_response(&self.scheme, &reply.payload)?;
        self.answered += 1;
        Ok(r)
    }

    pub fn answered(&self) -> usize {
        self.answered
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// Closes the connection and returns the transcript.
    pub fn close(self) -> Transcript {
        let _ = self.writer.shutdown(std::net::Shutdown::Both);
        self.transcript
    }
}

/// Proving algorithm backed by a remote server. Each challenge is sent at
/// most once and the first answer is pinned, which assumes a deterministic
/// prover. After a connection failure the next call reconnects; the cache
/// and the earlier transcripts are kept.
pub struct RemoteProver {
    addr: SocketAddr,
    scheme: Scheme,
    session: Option<Session>,
    cache: HashMap<Ordinal, Response>,
    closed: Vec<Transcript>,
}

pub fn remote_prover(addr: impl ToSocketAddrs, scheme: &Scheme) -> Result<RemoteProver> {
    let addr = addr
        .to_socket_addrs()?
        .next()
        .ok_or_else(|| Error::Parameter("address resolves to nothing".into()))?;
    let session = Session::connect(addr, scheme)?;
    Ok(RemoteProver {
        addr,
        scheme: scheme.clone(),
        session: Some(session),
        cache: HashMap::new(),
        closed: Vec::new(),
    })
}

impl RemoteProver {
    /// Distinct challenges answered so far.
    pub fn answered(&self) -> usize {
        self.cache.len()
    }

    /// Transcripts of all sessions, the live one last.
    pub fn transcripts(&self) -> Vec<Transcript> {
        let mut out = self.closed.clone();
        if let Some(s) = &self.session {
            out.push(s.transcript().clone());
        }
        out
    }

    pub fn close(mut self) -> Vec<Transcript> {
        if let Some(s) = self.session.take() {
            self.closed.push(s.close());
        }
        self.closed
    }
}

impl Prover for RemoteProver {
    fn answer(&mut self, c: &Challenge) -> Result<Response> {
        let ordinal = self.scheme.ordinal_of(c)?;
        if let Some(r) = self.cache.get(&ordinal) {
            return Ok(r.clone());
        }
        let answered = self.cache.len();
        let session = match &mut self.session {
            Some(s) => s,
            None => self.session.insert(Session::connect(self.addr, &self.scheme).map_err(|e| match e {
                Error::Connection { message, .. } => Error::Connection { message, answered },
                e => e,
            })?),
        };
        match session.query(c) {
            Ok(r) => {
                self.cache.insert(ordinal, r.clone());
                Ok(r)
            }
            Err(e) => {
                if let Some(s) = self.session.take() {
                    self.closed.push(s.close());
                }
                Err(match e {
                    Error::Connection { message, .. } => Error::Connection { message, answered },
                    e => e,
                })
            }
        }
    }

    fn kind(&self) -> ProverKind {
        ProverKind::Remote
    }
}

/// Parameters of one audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditPlan {
    pub t: u64,
    pub alpha: f64,
    pub sampling: Sampling,
    pub seed: u64,
    /// Overrides the `omega` derived from the extraction threshold.
    pub omega: Option<u128>,
}

/// How the verifier checks responses.
pub enum VerificationSource<'a> {
    /// Bounded-use precomputed pairs, consumed in order.
    Store(&'a mut PairStore),
    /// Keyed verification.
    Key(&'a SwKey),
    /// A retained copy of the encoded file.
    Local(&'a EncodedMessage),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOutcome {
    pub report: AuditReport,
    pub transcript: Transcript,
    /// Ordinals whose responses failed verification, in query order.
    pub failed: Vec<Ordinal>,
}

/// An audit that stopped early, with whatever was exchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionFailure {
    pub error: Error,
    pub transcript: Transcript,
}

impl fmt::Display for SessionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} frames exchanged)", self.error, self.transcript.frames.len())
    }
}

impl std::error::Error for SessionFailure {}

impl From<SessionFailure> for Error {
    fn from(f: SessionFailure) -> Self {
        f.error
    }
}

impl From<Error> for SessionFailure {
    fn from(error: Error) -> Self {
        Self {
            error,
            transcript: Transcript::default(),
        }
    }
}

/// Seeded fresh challenge ordinals.
pub fn sample_ordinals(gamma: u128, t: u64, sampling: Sampling, seed: u64) -> Result<Vec<Ordinal>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    match sampling {
        Sampling::WithReplacement => Ok((0..t).map(|_| rng.gen_range(0..gamma)).collect()),
        Sampling::WithoutReplacement => {
            if t as u128 > gamma {
                return Err(Error::Parameter(format!("t={t} exceeds gamma={gamma} without replacement")));
            }
            if let Ok(g) = usize::try_from(gamma) {
                return Ok(rand::seq::index::sample(&mut rng, g, t as usize)
                    .into_iter()
                    .map(|i| i as Ordinal)
                    .collect());
            }
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(t as usize);
            while out.len() < t as usize {
                let o = rng.gen_range(0..gamma);
                if seen.insert(o) {
                    out.push(o);
                }
            }
            Ok(out)
        }
    }
}

fn same_config(scheme: &Scheme, stored: &SchemeConfig) -> bool {
    let ours = SchemeConfig::from_scheme(scheme);
    (ours.scheme, ours.q, ours.n, ours.k, ours.ell, ours.code_kind)
        == (stored.scheme, stored.q, stored.n, stored.k, stored.ell, stored.code_kind)
}

/// Runs one audit over a fresh connection and evaluates it.
pub fn audit_session(
    addr: impl ToSocketAddrs,
    scheme: &Scheme,
    plan: &AuditPlan,
    source: VerificationSource<'_>,
) -> std::result::Result<AuditOutcome, SessionFailure> {
    let gamma = scheme.challenge_count()?;
    let omega = match plan.omega {
        Some(w) => w,
        None => omega_from_threshold(&threshold(scheme, DEFAULT_CODEWORD_CAP)?)?.omega,
    };
    let keyed = scheme.kind() == SchemeKind::ShachamWaters;

    enum Check<'a> {
        Stored(Response),
        Local(&'a EncodedMessage),
        Key(&'a SwKey),
    }
    let (queries, sampling): (Vec<(Ordinal, Check)>, Sampling) = match source {
        VerificationSource::Store(store) => {
            if !same_config(scheme, &store.config) {
                return Err(Error::Parameter("pair store was made for a different scheme".into()).into());
            }
            if plan.sampling != Sampling::WithReplacement {
                return Err(Error::Parameter("stored pairs are sampled with replacement".into()).into());
            }
            let t = usize::try_from(plan.t).map_err(|_| Error::Parameter("t too large".into()))?;
            let records = store.take(t)?;
            (records.into_iter().map(|(o, r)| (o, Check::Stored(r))).collect(), Sampling::WithReplacement)
        }
        VerificationSource::Local(m) => {
            if keyed {
                return Err(Error::Parameter("the keyed scheme is verified with the key".into()).into());
            }
            let os = sample_ordinals(gamma, plan.t, plan.sampling, plan.seed)?;
            (os.into_iter().map(|o| (o, Check::Local(m))).collect(), plan.sampling)
        }
        VerificationSource::Key(key) => {
            if !keyed {
                return Err(Error::Parameter("a key only verifies the keyed scheme".into()).into());
            }
            let os = sample_ordinals(gamma, plan.t, plan.sampling, plan.seed)?;
            (os.into_iter().map(|o| (o, Check::Key(key))).collect(), plan.sampling)
        }
    };

    let mut session = Session::connect(addr, scheme)?;
    let mut failed = Vec::new();
    for (ordinal, check) in &queries {
        let run = |session: &mut Session| -> Result<bool> {
            let c = scheme.challenge_at(*ordinal)?;
            let r = session.query(&c)?;
            match check {
                Check::Stored(expected) => scheme.verify_response(expected, &r),
                Check::Local(m) => scheme.verify_response(&scheme.respond(m, &c)?, &r),
                Check::Key(key) => {
                    let Challenge::Vector(v) = &c else { unreachable!("keyed challenges are vectors") };
                    let pair = SwResponse::from_response(&r).ok_or(Error::ShapeMismatch)?;
                    sw_verify(key, v, &pair)
                }
            }
        };
        match run(&mut session) {
            Ok(true) => {}
            Ok(false) => failed.push(*ordinal),
            Err(error) => {
                return Err(SessionFailure {
                    error,
                    transcript: session.close(),
                })
            }
        }
    }
    let transcript = session.close();
    let sample = AuditSample {
        t: plan.t,
        g: plan.t - failed.len() as u64,
        sampling,
        gamma,
        omega,
    };
    let report = audit_decision(&sample, plan.alpha).map_err(|error| SessionFailure {
        error,
        transcript: transcript.clone(),
    })?;
    Ok(AuditOutcome {
        report,
        transcript,
        failed,
    })
}
