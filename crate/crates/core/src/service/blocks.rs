use crate::algebra::FieldVector;
use crate::coding::{parse_num, EncodedMessage};
use crate::error::{Error, Result};
use crate::schemes::{Scheme, SchemeConfig};

/// An encoded file: the scheme configuration followed by one codeword per
/// message unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlocksFile {
    pub config: SchemeConfig,
    pub units: Vec<EncodedMessage>,
}

/// Splits raw bytes into big-endian 8-byte values, groups them into
/// `k`-element message units (zero-padding the last) and encodes each unit.
pub fn encode_bytes(scheme: &Scheme, raw: &[u8]) -> Result<BlocksFile> {
    if raw.is_empty() {
        return Err(Error::Format("input is empty".into()));
    }
    if raw.len() % 8 != 0 {
        return Err(Error::Format(format!("input length {} is not a multiple of 8", raw.len())));
    }
    let field = scheme.field();
    let q = field.modulus();
    let values: Vec<u64> = raw
        .chunks_exact(8)
        .enumerate()
        .map(|(i, b)| {
            let v = u64::from_be_bytes(b.try_into().expect("8 bytes"));
            if v >= q {
                return Err(Error::Format(format!("value {v} at position {i} is not below q={q}")));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let code = scheme.code();
    let units = values
        .chunks(code.k())
        .map(|chunk| {
            let mut m = chunk.to_vec();
            m.resize(code.k(), 0);
            code.encode(&FieldVector::from_values(field, m))
        })
        .collect::<Result<_>>()?;
    Ok(BlocksFile {
        config: SchemeConfig::from_scheme(scheme),
        units,
    })
}

impl BlocksFile {
    pub fn scheme(&self) -> Result<Scheme> {
        self.config.build()
    }

    pub fn unit(&self, index: usize) -> Result<&EncodedMessage> {
        self.units
            .get(index)
            .ok_or_else(|| Error::Parameter(format!("unit {index} out of range (file has {})", self.units.len())))
    }

    /// The unencoded message units.
    pub fn messages(&self, scheme: &Scheme) -> Result<Vec<FieldVector>> {
        self.units
            .iter()
            .map(|u| scheme.code().decode_unencode(u.blocks()))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = self.config.to_text();
        s.push_str(&format!("units={}\n", self.units.len()));
        for u in &self.units {
            let vals: Vec<String> = u.blocks().values().iter().map(u64::to_string).collect();
            s.push_str(&vals.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses a blocks file; every unit must be a codeword of the configured code.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut header = String::new();
        let mut declared = None;
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            match line.split_once('=') {
                Some(("units", v)) => declared = Some(parse_num::<usize>(v)?),
                Some(_) => {
                    header.push_str(line);
                    header.push('\n');
                }
                None => rows.push(line),
            }
        }
        let config = SchemeConfig::parse(&header)?;
        let scheme = config.build()?;
        let field = scheme.field();
        let units = rows
            .iter()
            .map(|row| {
                let vals = row.split_whitespace().map(parse_num::<u64>).collect::<Result<Vec<_>>>()?;
                if vals.len() != scheme.n() {
                    return Err(Error::Format(format!("unit has {} blocks, expected {}", vals.len(), scheme.n())));
                }
                let word = FieldVector::from_canonical(field, vals)?;
                scheme
                    .code()
                    .codeword(word)
                    .map_err(|_| Error::Format("unit is not a codeword of the configured code".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        if declared.is_some_and(|d| d != units.len()) {
            return Err(Error::Format(format!("header units={} but {} units present", declared.unwrap_or(0), units.len())));
        }
        if units.is_empty() {
            return Err(Error::Format("blocks file holds no units".into()));
        }
        Ok(Self { config, units })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use crate::coding::rs_code;
    use crate::schemes::SchemeKind;

    fn basic() -> Scheme {
        Scheme::new(SchemeKind::Basic, rs_code(PrimeField::new(5).unwrap(), 4, 2).unwrap(), None).unwrap()
    }

    fn raw(vals: &[u64]) -> Vec<u8> {
        vals.iter().flat_map(|v| v.to_be_bytes()).collect()
    }

    #[test]
    fn chunks_pads_and_round_trips() {
        let s = basic();
        let f = encode_bytes(&s, &raw(&[1, 2, 3])).unwrap();
        assert_eq!(f.units.len(), 2);
        let msgs = f.messages(&s).unwrap();
        assert_eq!(msgs[0].values(), &[1, 2]);
        assert_eq!(msgs[1].values(), &[3, 0]);
        assert_eq!(BlocksFile::from_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn rejects_out_of_range_and_ragged_input() {
        let s = basic();
        assert!(encode_bytes(&s, &raw(&[1, 5])).is_err());
        assert!(encode_bytes(&s, &[0u8; 7]).is_err());
        assert!(encode_bytes(&s, &[]).is_err());
    }

    #[test]
    fn rejects_non_codewords() {
        let s = basic();
        let text = encode_bytes(&s, &raw(&[1, 2])).unwrap().to_text();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let last = lines.last_mut().unwrap();
        let mut vals: Vec<u64> = last.split(' ').map(|v| v.parse().unwrap()).collect();
        vals[0] = (vals[0] + 1) % 5;
        *last = vals.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        assert!(BlocksFile::from_text(&lines.join("\n")).is_err());
    }
}
