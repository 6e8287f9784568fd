use std::io::{self, Read, Write};

use crate::algebra::{FieldElement, FieldVector};
use crate::error::{Error, Result};
use crate::schemes::{Challenge, Response, Scheme, SchemeKind};

pub const MAGIC: [u8; 4] = *b"POR1";

/// Frames larger than this are rejected before allocation.
pub const MAX_PAYLOAD: u32 = 16 << 20;

pub const ERR_CONFIG_MISMATCH: u8 = 0x01;
pub const ERR_MALFORMED_CHALLENGE: u8 = 0x02;
pub const ERR_PROTOCOL: u8 = 0x03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameType {
    Hello = 0x01,
    Challenge = 0x02,
    Response = 0x03,
    Error = 0x04,
}

impl FrameType {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            0x01 => FrameType::Hello,
            0x02 => FrameType::Challenge,
            0x03 => FrameType::Response,
            0x04 => FrameType::Error,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: FrameType, payload: Vec<u8>) -> Self {
        Self { kind, payload }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(9 + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(self.kind as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses exactly one frame occupying all of `bytes`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = bytes;
        let frame = read_frame(&mut cursor)?.ok_or_else(|| Error::Protocol("empty frame".into()))?;
        if !cursor.is_empty() {
            return Err(Error::Protocol("trailing bytes after frame".into()));
        }
        Ok(frame)
    }

    pub fn error(code: u8, message: &str) -> Self {
        let mut payload = vec![code];
        payload.extend_from_slice(message.as_bytes());
        Frame::new(FrameType::Error, payload)
    }

    /// `(code, message)` of an ERROR frame.
    pub fn error_parts(&self) -> Option<(u8, String)> {
        if self.kind != FrameType::Error {
            return None;
        }
        let (&code, rest) = self.payload.split_first()?;
        Some((code, String::from_utf8_lossy(rest).into_owned()))
    }
}

pub fn write_frame(w: &mut impl Write, frame: &Frame) -> Result<()> {
    w.write_all(&frame.to_bytes())?;
    w.flush()?;
    Ok(())
}

/// Reads one frame; `None` on a clean end of stream before the first byte.
pub fn read_frame(r: &mut impl Read) -> Result<Option<Frame>> {
    let mut header = [0u8; 9];
    let mut filled = 0;
    while filled < header.len() {
        match r.read(&mut header[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => return Err(Error::Protocol("stream ended inside a frame header".into())),
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    if header[..4] != MAGIC {
        return Err(Error::Protocol("bad frame magic".into()));
    }
    let kind = FrameType::from_byte(header[4])
        .ok_or_else(|| Error::Protocol(format!("unknown frame type 0x{:02x}", header[4])))?;
    let len = u32::from_be_bytes([header[5], header[6], header[7], header[8]]);
    if len > MAX_PAYLOAD {
        return Err(Error::Protocol(format!("payload of {len} bytes exceeds limit")));
    }
    let mut payload = vec![0u8; len as usize];
    r.read_exact(&mut payload).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Protocol("stream ended inside a frame payload".into()),
        _ => e.into(),
    })?;
    Ok(Some(Frame { kind, payload }))
}

/// Scheme parameters exchanged at session start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hello {
    pub kind: SchemeKind,
    pub q: u64,
    pub n: u32,
    pub k: u32,
    /// 0 when the scheme has no challenge weight.
    pub ell: u32,
}

impl Hello {
    pub fn for_scheme(scheme: &Scheme) -> Self {
        Self {
            kind: scheme.kind(),
            q: scheme.field().modulus(),
            n: scheme.n() as u32,
            k: scheme.code().k() as u32,
            ell: scheme.ell().unwrap_or(0) as u32,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(21);
        out.push(self.kind.wire_id());
        out.extend_from_slice(&self.q.to_be_bytes());
        out.extend_from_slice(&self.n.to_be_bytes());
        out.extend_from_slice(&self.k.to_be_bytes());
        out.extend_from_slice(&self.ell.to_be_bytes());
        out
    }

    pub fn decode(payload: &[u8]) -> Result<Self> {
        if payload.len() != 21 {
            return Err(Error::Protocol(format!("HELLO payload has {} bytes, expected 21", payload.len())));
        }
        let kind = SchemeKind::from_wire_id(payload[0])
            .ok_or_else(|| Error::Protocol(format!("unknown scheme kind 0x{:02x}", payload[0])))?;
        let u32_at = |i: usize| u32::from_be_bytes(payload[i..i + 4].try_into().expect("4 bytes"));
        Ok(Self {
            kind,
            q: u64::from_be_bytes(payload[1..9].try_into().expect("8 bytes")),
            n: u32_at(9),
            k: u32_at(13),
            ell: u32_at(17),
        })
    }

    pub fn frame(&self) -> Frame {
        Frame::new(FrameType::Hello, self.encode())
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::InvalidChallenge(msg.into())
}

fn index_u32(i: usize) -> Result<[u8; 4]> {
    u32::try_from(i)
        .map(u32::to_be_bytes)
        .map_err(|_| Error::Protocol(format!("index {i} does not fit in 4 bytes")))
}

/// CHALLENGE payload. Basic challenges travel as their 0-based ordinal,
/// subsets and vectors as 1-based indices.
pub fn encode_challenge(scheme: &Scheme, c: &Challenge) -> Result<Vec<u8>> {
    scheme.validate_challenge(c)?;
    let mut out = Vec::new();
    match c {
        Challenge::Index(i) => out.extend_from_slice(&index_u32(i - 1)?),
        Challenge::Subset(js) => {
            let len = u16::try_from(js.len()).map_err(|_| Error::Protocol("subset too large".into()))?;
            out.extend_from_slice(&len.to_be_bytes());
            for &j in js {
                out.extend_from_slice(&index_u32(j)?);
            }
        }
        Challenge::Vector(v) => {
            let weight = u16::try_from(v.weight()).map_err(|_| Error::Protocol("vector weight too large".into()))?;
            out.extend_from_slice(&weight.to_be_bytes());
            for (i, &x) in v.values().iter().enumerate().filter(|(_, &x)| x != 0) {
                out.extend_from_slice(&index_u32(i + 1)?);
                out.extend_from_slice(&x.to_be_bytes());
            }
        }
    }
    Ok(out)
}

/// Parses and validates a CHALLENGE payload. Any failure is an
/// `InvalidChallenge`, answered on the wire with error code 0x02.
pub fn decode_challenge(scheme: &Scheme, payload: &[u8]) -> Result<Challenge> {
    let n = scheme.n();
    let c = match scheme.kind() {
        SchemeKind::Basic => {
            let bytes: [u8; 4] = payload
                .try_into()
                .map_err(|_| malformed(format!("basic challenge has {} bytes, expected 4", payload.len())))?;
            let ordinal = u32::from_be_bytes(bytes) as usize;
            Challenge::Index(ordinal.checked_add(1).ok_or_else(|| malformed("ordinal overflow"))?)
        }
        SchemeKind::Multiblock => {
            if payload.len() < 2 {
                return Err(malformed("truncated subset challenge"));
            }
            let len = u16::from_be_bytes([payload[0], payload[1]]) as usize;
            let body = &payload[2..];
            if body.len() != 4 * len {
                return Err(malformed(format!("subset challenge declares {len} indices but carries {} bytes", body.len())));
            }
            Challenge::Subset(
                body.chunks_exact(4)
                    .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")) as usize)
                    .collect(),
            )
        }
        SchemeKind::LcV1 | SchemeKind::LcV2 | SchemeKind::ShachamWaters => {
            if payload.len() < 2 {
                return Err(malformed("truncated vector challenge"));
            }
            let count = u16::from_be_bytes([payload[0], payload[1]]) as usize;
            let body = &payload[2..];
            if body.len() != 12 * count {
                return Err(malformed(format!("vector challenge declares {count} entries but carries {} bytes", body.len())));
            }
            let field = scheme.field();
            let mut values = vec![0u64; n];
            let mut last = 0usize;
            for entry in body.chunks_exact(12) {
                let idx = u32::from_be_bytes(entry[..4].try_into().expect("4 bytes")) as usize;
                let coeff = u64::from_be_bytes(entry[4..].try_into().expect("8 bytes"));
                if idx <= last || idx > n {
                    return Err(malformed(format!("entry index {idx} is not ascending within 1..={n}")));
                }
                if coeff == 0 || coeff >= field.modulus() {
                    return Err(malformed(format!("coefficient {coeff} is not a nonzero element of F_{}", field.modulus())));
                }
                values[idx - 1] = coeff;
                last = idx;
            }
            Challenge::Vector(FieldVector::from_values(field, values))
        }
    };
    scheme
        .validate_challenge(&c)
        .map_err(|e| malformed(e.to_string().trim_start_matches("invalid challenge: ").to_string()))?;
    Ok(c)
}

pub fn encode_response(r: &Response) -> Vec<u8> {
    r.elements().iter().flat_map(|e| e.to_be_bytes()).collect()
}

/// Parses a RESPONSE payload of the scheme's arity. Values at or above `q`
/// are rejected.
pub fn decode_response(scheme: &Scheme, payload: &[u8]) -> Result<Response> {
    let arity = scheme.response_arity();
    if payload.len() != 8 * arity {
        return Err(Error::Protocol(format!(
            "response has {} bytes, expected {}",
            payload.len(),
            8 * arity
        )));
    }
    let field = scheme.field();
    let elems: Vec<FieldElement> = payload
        .chunks_exact(8)
        .map(|b| FieldElement::from_be_bytes(field, b.try_into().expect("8 bytes")))
        .collect::<Result<_>>()
        .map_err(|e| Error::Protocol(format!("response element: {e}")))?;
    Ok(match scheme.kind() {
        SchemeKind::Multiblock => Response::Tuple(elems),
        SchemeKind::ShachamWaters => Response::Pair { mu: elems[0], tau: elems[1] },
        _ => Response::Element(elems[0]),
    })
}
