use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::coding::{parse_num, EncodedMessage};
use crate::error::{Error, Result};
use crate::schemes::{Ordinal, Response, Scheme, SchemeConfig, SchemeKind};

use super::protocol::{decode_response, encode_response};

/// Precomputed challenge-response pairs for bounded-use auditing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairStore {
    pub config: SchemeConfig,
    pub seed: u64,
    records: Vec<(Ordinal, Response)>,
    cursor: usize,
}

/// Draws `count` ordinals uniformly (with replacement) from `[0, gamma)` and
/// stores the honest responses.
pub fn precompute_pairs(scheme: &Scheme, m: &EncodedMessage, count: usize, seed: u64) -> Result<PairStore> {
    if count == 0 {
        return Err(Error::Parameter("pair count must be at least 1".into()));
    }
    if scheme.kind() == SchemeKind::ShachamWaters {
        return Err(Error::Parameter("the keyed scheme is audited with the key, not with stored pairs".into()));
    }
    let gamma = scheme.challenge_count()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let records = (0..count)
        .map(|_| {
            let ordinal = rng.gen_range(0..gamma);
            let c = scheme.challenge_at(ordinal)?;
            Ok((ordinal, scheme.respond(m, &c)?))
        })
        .collect::<Result<_>>()?;
    Ok(PairStore {
        config: SchemeConfig::from_scheme(scheme),
        seed,
        records,
        cursor: 0,
    })
}

impl PairStore {
    pub fn count(&self) -> usize {
        self.records.len()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn remaining(&self) -> usize {
        self.records.len() - self.cursor
    }

    pub fn records(&self) -> &[(Ordinal, Response)] {
        &self.records
    }

    /// Consumes the next `t` records.
    pub fn take(&mut self, t: usize) -> Result<Vec<(Ordinal, Response)>> {
        if t > self.remaining() {
            return Err(Error::StoreExhausted {
                requested: t,
                remaining: self.remaining(),
            });
        }
        let out = self.records[self.cursor..self.cursor + t].to_vec();
        self.cursor += t;
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.config.to_text();
        s.push_str(&format!(
            "sampling=with_replacement\nseed={}\ncount={}\ncursor={}\n",
            self.seed,
            self.records.len(),
            self.cursor
        ));
        for (o, r) in &self.records {
            let hex: String = encode_response(r).iter().map(|b| format!("{b:02x}")).collect();
            s.push_str(&format!("{o} {hex}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut header = String::new();
        let (mut seed, mut count, mut cursor) = (None, None, None);
        let mut raw = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some((key, value)) = line.split_once('=') {
                match key.trim() {
                    "seed" => seed = Some(parse_num::<u64>(value.trim())?),
                    "count" => count = Some(parse_num::<usize>(value.trim())?),
                    "cursor" => cursor = Some(parse_num::<usize>(value.trim())?),
                    "sampling" if value.trim() == "with_replacement" => {}
                    "sampling" => return Err(Error::Format(format!("unsupported sampling '{}'", value.trim()))),
                    _ => {
                        header.push_str(line);
                        header.push('\n');
                    }
                }
            } else {
                raw.push(line);
            }
        }
        let config = SchemeConfig::parse(&header)?;
        let scheme = config.build()?;
        let gamma = scheme.challenge_count()?;
        let missing = |k: &str| Error::Format(format!("pair store is missing '{k}'"));
        let count = count.ok_or_else(|| missing("count"))?;
        let cursor = cursor.ok_or_else(|| missing("cursor"))?;
        let records = raw
            .iter()
            .map(|line| {
                let (o, hex) = line
                    .split_once(' ')
                    .ok_or_else(|| Error::Format(format!("bad record '{line}'")))?;
                let ordinal: Ordinal = parse_num(o)?;
                if ordinal >= gamma {
                    return Err(Error::Format(format!("record ordinal {ordinal} outside [0, {gamma})")));
                }
                let bytes = decode_hex(hex.trim())?;
                let r = decode_response(&scheme, &bytes).map_err(|e| Error::Format(e.to_string()))?;
                Ok((ordinal, r))
            })
            .collect::<Result<Vec<_>>>()?;
        if records.len() != count {
            return Err(Error::Format(format!("header count={count} but {} records", records.len())));
        }
        if cursor > count {
            return Err(Error::Format(format!("cursor={cursor} exceeds count={count}")));
        }
        Ok(Self {
            config,
            seed: seed.ok_or_else(|| missing("seed"))?,
            records,
            cursor,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_text())
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn decode_hex(s: &str) -> Result<Vec<u8>> {
    if s.len() % 2 != 0 {
        return Err(Error::Format(format!("odd-length hex '{s}'")));
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(|_| Error::Format(format!("bad hex '{s}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FieldVector, PrimeField};
    use crate::coding::rs_code;

    fn setup(kind: SchemeKind, ell: Option<usize>) -> (Scheme, EncodedMessage) {
        let field = PrimeField::new(5).unwrap();
        let code = rs_code(field, 4, 2).unwrap();
        let m = code.encode(&FieldVector::from_values(field, [3, 1])).unwrap();
        (Scheme::new(kind, code, ell).unwrap(), m)
    }

    #[test]
    fn records_match_honest_responses() {
        let (s, m) = setup(SchemeKind::Basic, None);
        let store = precompute_pairs(&s, &m, 10, 42).unwrap();
        assert_eq!(store.count(), 10);
        for (o, r) in store.records() {
            assert!(*o < 4);
            assert_eq!(*r, s.respond(&m, &s.challenge_at(*o).unwrap()).unwrap());
        }
        assert_eq!(store, precompute_pairs(&s, &m, 10, 42).unwrap());
        assert_ne!(store, precompute_pairs(&s, &m, 10, 43).unwrap());
    }

    #[test]
    fn zero_count_rejected() {
        let (s, m) = setup(SchemeKind::Basic, None);
        assert!(matches!(precompute_pairs(&s, &m, 0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn text_round_trip_and_consumption() {
        let (s, m) = setup(SchemeKind::Multiblock, Some(2));
        let mut store = precompute_pairs(&s, &m, 5, 7).unwrap();
        assert_eq!(PairStore::from_text(&store.to_text()).unwrap(), store);
        assert_eq!(store.take(3).unwrap().len(), 3);
        assert_eq!(store.cursor(), 3);
        let back = PairStore::from_text(&store.to_text()).unwrap();
        assert_eq!(back.cursor(), 3);
        assert_eq!(
            store.take(3),
            Err(Error::StoreExhausted { requested: 3, remaining: 2 })
        );
        assert_eq!(store.cursor(), 3);
        store.take(2).unwrap();
        assert!(store.take(1).is_err());
    }

    #[test]
    fn save_and_load() {
        let (s, m) = setup(SchemeKind::LcV2, Some(2));
        let store = precompute_pairs(&s, &m, 4, 1).unwrap();
        let dir = std::env::temp_dir().join(format!("por-store-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pairs.txt");
        store.save(&path).unwrap();
        assert_eq!(PairStore::load(&path).unwrap(), store);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("seed=1\ncount=4\ncursor=0\n"));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn tampered_store_rejected() {
        let (s, m) = setup(SchemeKind::Basic, None);
        let text = precompute_pairs(&s, &m, 2, 1).unwrap().to_text();
        assert!(PairStore::from_text(&text.replace("count=2", "count=3")).is_err());
        assert!(PairStore::from_text(&text.replace("cursor=0", "cursor=9")).is_err());
    }
}
