//! Linear message encodings `e: (F_q)^k -> (F_q)^n`, exhaustive distance
//! computation and minimum-distance (nearest-neighbour) decoding.

use std::fmt::Write as _;

use crate::algebra::{hamming, FieldVector, PrimeField};
use crate::error::{too_large, Error, Result};

/// Default cap on the number of codewords an exhaustive search may visit.
pub const DEFAULT_CODEWORD_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// Evaluation Reed-Solomon code at the points `1, 2, ..., n`.
    ReedSolomon,
    /// Arbitrary full-rank generator matrix.
    Matrix,
}

impl CodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CodeKind::ReedSolomon => "rs",
            CodeKind::Matrix => "matrix",
        }
    }
}

/// A linear `[n, k]` code over `F_q` given by a `k x n` generator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    field: PrimeField,
    n: usize,
    k: usize,
    kind: CodeKind,
    generator: Vec<FieldVector>,
    declared_distance: Option<usize>,
    // Information set: k columns whose k x k submatrix is invertible, and
    // that submatrix's inverse (row-major).
    info_cols: Vec<usize>,
    info_inv: Vec<Vec<u64>>,
}

/// A codeword handed to the prover.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedMessage {
    blocks: FieldVector,
}

impl EncodedMessage {
    pub fn blocks(&self) -> &FieldVector {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn field(&self) -> PrimeField {
        self.blocks.field()
    }

    /// Wraps a vector without checking membership in any code. Used for
    /// adversarial or externally supplied block sets.
    pub fn unchecked(blocks: FieldVector) -> Self {
        Self { blocks }
    }
}

/// Evaluation Reed-Solomon code: `m` maps to `(p(1), ..., p(n))` where
/// `p(x) = m_1 + m_2 x + ... + m_k x^(k-1)`.
pub fn rs_code(field: PrimeField, n: usize, k: usize) -> Result<LinearCode> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if n as u128 > field.modulus() as u128 {
        return Err(Error::Parameter(format!(
            "Reed-Solomon length n={n} exceeds q={}",
            field.modulus()
        )));
    }
    let generator = (0..k)
        .map(|i| {
            FieldVector::from_values(field, (1..=n as u64).map(|x| field.pow(x % field.modulus(), i as u64)))
        })
        .collect();
    let mut code = LinearCode::build(field, n, k, CodeKind::ReedSolomon, generator)?;
    code.declared_distance = Some(n - k + 1);
    Ok(code)
}

impl LinearCode {
    /// Code with an explicit generator matrix (one row per message coordinate).
    pub fn from_generator(field: PrimeField, rows: Vec<FieldVector>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::Parameter("generator matrix has no rows".into()));
        }
        let n = rows[0].len();
        for r in &rows {
            if r.field() != field {
                return Err(Error::MismatchedFields {
                    left: field.modulus(),
                    right: r.field().modulus(),
                });
            }
            if r.len() != n {
                return Err(Error::LengthMismatch { left: n, right: r.len() });
            }
        }
        Self::build(field, n, k, CodeKind::Matrix, rows)
    }

    /// The trivial code `M* = (F_q)^n` (identity generator, distance 1).
    pub fn full_space(field: PrimeField, n: usize) -> Result<Self> {
        let rows = (0..n).map(|i| FieldVector::unit(field, n, i)).collect();
        let mut code = Self::from_generator(field, rows)?;
        code.declared_distance = Some(1);
        Ok(code)
    }

    /// Repetition code of length `n` over `F_q`.
    pub fn repetition(field: PrimeField, n: usize) -> Result<Self> {
        let mut code = Self::from_generator(field, vec![FieldVector::from_values(field, vec![1; n])])?;
        code.declared_distance = Some(n);
        Ok(code)
    }

    fn build(
        field: PrimeField,
        n: usize,
        k: usize,
        kind: CodeKind,
        generator: Vec<FieldVector>,
    ) -> Result<Self> {
        if k > n {
            return Err(Error::Parameter(format!("k={k} exceeds n={n}")));
        }
        let info_cols = pivot_columns(field, &generator);
        if info_cols.len() < k {
            return Err(Error::Parameter(format!(
                "generator matrix has rank {} < k={k}",
                info_cols.len()
            )));
        }
        let sub: Vec<Vec<u64>> = generator
            .iter()
            .map(|row| info_cols.iter().map(|&c| row.values()[c]).collect())
            .collect();
        let info_inv = invert(field, sub).expect("pivot columns give an invertible submatrix");
        Ok(Self {
            field,
            n,
            k,
            kind,
            generator,
            declared_distance: None,
            info_cols,
            info_inv,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn generator(&self) -> &[FieldVector] {
        &self.generator
    }

    pub fn declared_distance(&self) -> Option<usize> {
        self.declared_distance
    }

    /// Records a known minimum distance (e.g. from a construction).
    pub fn with_declared_distance(mut self, d: usize) -> Self {
        self.declared_distance = Some(d);
        self
    }

    /// `q^k`, or `None` if it does not fit in `u128`.
    pub fn message_count(&self) -> Option<u128> {
        (self.field.modulus() as u128).checked_pow(self.k as u32)
    }

    fn enumerable_messages(&self, cap: u128) -> Result<u128> {
        match self.message_count() {
            Some(c) if c <= cap => Ok(c),
            Some(c) => Err(too_large("message space", c, cap)),
            None => Err(too_large(
                "message space",
                format!("{}^{}", self.field.modulus(), self.k),
                cap,
            )),
        }
    }

    /// Message with lexicographic index `index` (first coordinate most significant).
    pub fn message_at(&self, index: u128) -> FieldVector {
        let q = self.field.modulus() as u128;
        let mut digits = vec![0u64; self.k];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % q) as u64;
            rest /= q;
        }
        FieldVector::from_values(self.field, digits)
    }

    /// Inverse of [`message_at`](Self::message_at).
    pub fn message_index(&self, m: &FieldVector) -> u128 {
        let q = self.field.modulus() as u128;
        m.values().iter().fold(0u128, |acc, &v| acc * q + v as u128)
    }

    pub fn encode(&self, m: &FieldVector) -> Result<EncodedMessage> {
        if m.field() != self.field {
            return Err(Error::MismatchedFields {
                left: self.field.modulus(),
                right: m.field().modulus(),
            });
        }
        if m.len() != self.k {
            return Err(Error::LengthMismatch { left: self.k, right: m.len() });
        }
        Ok(EncodedMessage {
            blocks: self.encode_unchecked(m.values()),
        })
    }

    fn encode_unchecked(&self, m: &[u64]) -> FieldVector {
        let f = self.field;
        let mut out = vec![0u64; self.n];
        for (row, &coef) in self.generator.iter().zip(m) {
            if coef == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row.values()) {
                *o = f.add(*o, f.mul(coef, g));
            }
        }
        FieldVector::from_values(f, out)
    }

    /// Recovers `m` from a codeword; `NotACodeword` if `word` is not in the code.
    pub fn decode_unencode(&self, word: &FieldVector) -> Result<FieldVector> {
        if word.field() != self.field {
            return Err(Error::MismatchedFields {
                left: self.field.modulus(),
                right: word.field().modulus(),
            });
        }
        if word.len() != self.n {
            return Err(Error::LengthMismatch { left: self.n, right: word.len() });
        }
        let f = self.field;
        let mut m = vec![0u64; self.k];
        for (i, &c) in self.info_cols.iter().enumerate() {
            let y = word.values()[c];
            for (j, slot) in m.iter_mut().enumerate() {
                *slot = f.add(*slot, f.mul(y, self.info_inv[i][j]));
            }
        }
        if self.encode_unchecked(&m).values() != word.values() {
            return Err(Error::NotACodeword);
        }
        Ok(FieldVector::from_values(f, m))
    }

    /// Membership-checked wrapper around a received word.
    pub fn codeword(&self, word: FieldVector) -> Result<EncodedMessage> {
        self.decode_unencode(&word)?;
        Ok(EncodedMessage { blocks: word })
    }

    /// All codewords in message-index order; fails above `cap`.
    pub fn codewords(&self, cap: u128) -> Result<impl Iterator<Item = EncodedMessage> + '_> {
        let count = self.enumerable_messages(cap)?;
        Ok((0..count).map(move |i| EncodedMessage {
            blocks: self.encode_unchecked(self.message_at(i).values()),
        }))
    }

    /// Visits the weight of every nonzero codeword. Codewords are updated in
    /// place by adding one generator row per touched message digit.
    fn for_each_nonzero_weight(&self, cap: u128, mut visit: impl FnMut(usize)) -> Result<()> {
        let count = self.enumerable_messages(cap)?;
        let f = self.field;
        let q = f.modulus();
        let mut digits = vec![0u64; self.k];
        let mut word = vec![0u64; self.n];
        for _ in 1..count {
            for j in (0..self.k).rev() {
                for (w, &g) in word.iter_mut().zip(self.generator[j].values()) {
                    *w = f.add(*w, g);
                }
                digits[j] += 1;
                if digits[j] < q {
                    break;
                }
                digits[j] = 0;
            }
            visit(word.iter().filter(|&&x| x != 0).count());
        }
        Ok(())
    }

    /// Minimum distance by enumeration (minimum nonzero codeword weight).
    pub fn code_distance(&self, cap: u128) -> Result<usize> {
        let mut best = self.n;
        self.for_each_nonzero_weight(cap, |w| best = best.min(w))?;
        Ok(best)
    }

    /// Set of weights of nonzero codewords, ascending.
    pub fn nonzero_weights(&self, cap: u128) -> Result<Vec<usize>> {
        let mut seen = vec![false; self.n + 1];
        self.for_each_nonzero_weight(cap, |w| seen[w] = true)?;
        Ok((0..=self.n).filter(|&w| seen[w]).collect())
    }

    /// The distance: declared if known, otherwise computed by enumeration.
    pub fn distance(&self, cap: u128) -> Result<usize> {
        match self.declared_distance {
            Some(d) => Ok(d),
            None => self.code_distance(cap),
        }
    }

    /// Serializes the code in the text description format.
    pub fn to_description(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "q={}", self.field.modulus());
        let _ = writeln!(out, "n={}", self.n);
        let _ = writeln!(out, "k={}", self.k);
        let _ = writeln!(out, "kind={}", self.kind.as_str());
        if self.kind == CodeKind::Matrix {
            for row in &self.generator {
                let _ = writeln!(out, "{row}");
            }
        }
        out
    }

    /// Parses `q=`, `n=`, `k=`, `kind=rs|matrix` header lines followed, for
    /// `matrix`, by `k` rows of `n` space-separated integers.
    pub fn from_description(text: &str) -> Result<Self> {
        let mut q = None;
        let mut n = None;
        let mut k = None;
        let mut kind = None;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if let Some((key, value)) = line.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "q" => q = Some(parse_num::<u64>(value)?),
                    "n" => n = Some(parse_num::<usize>(value)?),
                    "k" => k = Some(parse_num::<usize>(value)?),
                    "kind" => {
                        kind = Some(match value {
                            "rs" => CodeKind::ReedSolomon,
                            "matrix" => CodeKind::Matrix,
                            other => return Err(Error::Format(format!("unknown code kind '{other}'"))),
                        })
                    }
                    other => return Err(Error::Format(format!("unknown key '{other}'"))),
                }
            } else {
                rows.push(
                    line.split_whitespace()
                        .map(parse_num::<u64>)
                        .collect::<Result<_>>()?,
                );
            }
        }
        let q = q.ok_or_else(|| Error::Format("missing q".into()))?;
        let n = n.ok_or_else(|| Error::Format("missing n".into()))?;
        let k = k.ok_or_else(|| Error::Format("missing k".into()))?;
        let field = PrimeField::new(q)?;
        match kind.ok_or_else(|| Error::Format("missing kind".into()))? {
            CodeKind::ReedSolomon => rs_code(field, n, k),
            CodeKind::Matrix => {
                if rows.len() != k {
                    return Err(Error::Format(format!("expected {k} generator rows, found {}", rows.len())));
                }
                let rows = rows
                    .into_iter()
                    .map(|r| {
                        if r.len() != n {
                            return Err(Error::Format(format!("row has {} entries, expected {n}", r.len())));
                        }
                        FieldVector::from_canonical(field, r)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_generator(field, rows)
            }
        }
    }
}

pub(crate) fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("expected an integer, found '{s}'")))
}

/// Column indices of the pivots found by row reduction.
fn pivot_columns(field: PrimeField, rows: &[FieldVector]) -> Vec<usize> {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.values().to_vec()).collect();
    let n = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = field.inv(m[r][c]).expect("nonzero pivot");
        for v in m[r].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c];
                for j in 0..n {
                    let sub = field.mul(factor, m[r][j]);
                    m[i][j] = field.sub(m[i][j], sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Inverse of a square matrix by Gauss-Jordan elimination.
fn invert(field: PrimeField, mut a: Vec<Vec<u64>>) -> Option<Vec<Vec<u64>>> {
    let k = a.len();
    let mut inv: Vec<Vec<u64>> = (0..k)
        .map(|i| (0..k).map(|j| u64::from(i == j)).collect())
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| a[i][c] != 0)?;
        a.swap(c, p);
        inv.swap(c, p);
        let s = field.inv(a[c][c]).ok()?;
        for j in 0..k {
            a[c][j] = field.mul(a[c][j], s);
            inv[c][j] = field.mul(inv[c][j], s);
        }
        for i in 0..k {
            if i != c && a[i][c] != 0 {
                let factor = a[i][c];
                for j in 0..k {
                    let x = field.mul(factor, a[c][j]);
                    a[i][j] = field.sub(a[i][j], x);
                    let y = field.mul(factor, inv[c][j]);
                    inv[i][j] = field.sub(inv[i][j], y);
                }
            }
        }
    }
    Some(inv)
}

/// Outcome of a nearest-neighbour search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nearest {
    pub index: usize,
    pub distance: usize,
    /// More than one codebook entry attains the minimum distance.
    pub tie: bool,
}

/// Exhaustive minimum-Hamming-distance search. Ties resolve to the lowest
/// index and are flagged.
pub fn nearest_codeword<T, C>(word: &[T], codebook: &[C]) -> Result<Nearest>
where
    T: PartialEq,
    C: AsRef<[T]>,
{
    let mut best: Option<Nearest> = None;
    for (index, entry) in codebook.iter().enumerate() {
        let entry = entry.as_ref();
        if entry.len() != word.len() {
            return Err(Error::LengthMismatch {
                left: word.len(),
                right: entry.len(),
            });
        }
        let distance = hamming(word, entry);
        match &mut best {
            None => best = Some(Nearest { index, distance, tie: false }),
            Some(b) if distance < b.distance => *b = Nearest { index, distance, tie: false },
            Some(b) if distance == b.distance => b.tie = true,
            Some(_) => {}
        }
    }
    best.ok_or(Error::EmptyCodebook)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn v(field: PrimeField, xs: &[u64]) -> FieldVector {
        FieldVector::from_values(field, xs.iter().copied())
    }

    #[test]
    fn rs_parameters_and_encoding() {
        let f5 = f(5);
        let code = rs_code(f5, 4, 2).unwrap();
        assert_eq!(code.declared_distance(), Some(3));
        let c = code.encode(&v(f5, &[1, 1])).unwrap();
        assert_eq!(c.blocks().values(), &[2, 3, 4, 0]);
        assert_eq!(code.decode_unencode(c.blocks()).unwrap().values(), &[1, 1]);
        assert!(matches!(rs_code(f5, 6, 2), Err(Error::Parameter(_))));
        assert!(matches!(rs_code(f5, 3, 4), Err(Error::Parameter(_))));
    }

    #[test]
    fn round_trip_all_messages() {
        let f5 = f(5);
        let code = rs_code(f5, 4, 2).unwrap();
        for i in 0..25 {
            let m = code.message_at(i);
            assert_eq!(code.message_index(&m), i);
            let c = code.encode(&m).unwrap();
            assert_eq!(code.decode_unencode(c.blocks()).unwrap(), m);
        }
    }

    #[test]
    fn non_codeword_rejected() {
        let f5 = f(5);
        let code = rs_code(f5, 4, 2).unwrap();
        let word = v(f5, &[1, 1, 1, 2]);
        // brute-force membership agrees
        assert!(code.codewords(DEFAULT_CODEWORD_CAP).unwrap().all(|c| c.blocks() != &word));
        assert_eq!(code.decode_unencode(&word), Err(Error::NotACodeword));
    }

    #[test]
    fn distances() {
        assert_eq!(rs_code(f(5), 4, 2).unwrap().code_distance(DEFAULT_CODEWORD_CAP).unwrap(), 3);
        assert_eq!(LinearCode::repetition(f(3), 3).unwrap().code_distance(DEFAULT_CODEWORD_CAP).unwrap(), 3);
        assert_eq!(rs_code(f(7), 6, 3).unwrap().code_distance(DEFAULT_CODEWORD_CAP).unwrap(), 4);
        let big = rs_code(f(7), 6, 3).unwrap();
        assert!(matches!(big.code_distance(100), Err(Error::TooLargeToEnumerate { .. })));
    }

    #[test]
    fn rs_codes_are_mds() {
        for q in [5u64, 7] {
            for n in 1..=q as usize {
                for k in 1..=n {
                    let code = rs_code(f(q), n, k).unwrap();
                    if code.message_count().unwrap() > 20_000 {
                        continue;
                    }
                    assert_eq!(code.code_distance(DEFAULT_CODEWORD_CAP).unwrap(), n - k + 1, "q={q} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn rank_deficient_generator_rejected() {
        let f5 = f(5);
        let rows = vec![v(f5, &[1, 2, 3]), v(f5, &[2, 4, 1])];
        assert!(matches!(LinearCode::from_generator(f5, rows), Err(Error::Parameter(_))));
    }

    #[test]
    fn matrix_code_decodes_with_nonleading_information_set() {
        let f5 = f(5);
        let rows = vec![v(f5, &[0, 1, 0, 2]), v(f5, &[0, 0, 1, 3])];
        let code = LinearCode::from_generator(f5, rows).unwrap();
        for i in 0..25 {
            let m = code.message_at(i);
            let c = code.encode(&m).unwrap();
            assert_eq!(code.decode_unencode(c.blocks()).unwrap(), m);
        }
    }

    #[test]
    fn nearest_codeword_examples() {
        let f5 = f(5);
        let code = rs_code(f5, 4, 2).unwrap();
        let book: Vec<Vec<u64>> = code
            .codewords(DEFAULT_CODEWORD_CAP)
            .unwrap()
            .map(|c| c.blocks().values().to_vec())
            .collect();
        let target = code.message_index(&v(f5, &[1, 1])) as usize;
        let exact = nearest_codeword(&[2u64, 3, 4, 0], &book).unwrap();
        assert_eq!(exact, Nearest { index: target, distance: 0, tie: false });
        let flipped = nearest_codeword(&[2u64, 3, 4, 1], &book).unwrap();
        assert_eq!(flipped, Nearest { index: target, distance: 1, tie: false });

        let two = vec![vec![0u8, 0], vec![1, 1]];
        let r = nearest_codeword(&[0u8, 1], &two).unwrap();
        assert_eq!(r, Nearest { index: 0, distance: 1, tie: true });

        let empty: Vec<Vec<u8>> = vec![];
        assert_eq!(nearest_codeword(&[0u8], &empty), Err(Error::EmptyCodebook));
    }

    #[test]
    fn unique_decoding_radius_exhaustive() {
        let f5 = f(5);
        let code = rs_code(f5, 4, 2).unwrap();
        let book: Vec<Vec<u64>> = code
            .codewords(DEFAULT_CODEWORD_CAP)
            .unwrap()
            .map(|c| c.blocks().values().to_vec())
            .collect();
        for (idx, c) in book.iter().enumerate() {
            for pos in 0..4 {
                for delta in 1..5 {
                    let mut w = c.clone();
                    w[pos] = (w[pos] + delta) % 5;
                    let r = nearest_codeword(&w, &book).unwrap();
                    assert_eq!((r.index, r.distance, r.tie), (idx, 1, false));
                }
            }
        }
    }

    #[test]
    fn description_round_trip() {
        let rs = rs_code(f(5), 4, 2).unwrap();
        assert_eq!(LinearCode::from_description(&rs.to_description()).unwrap(), rs);
        let text = "q=5\nn=4\nk=2\nkind=matrix\n1 0 1 1\n0 1 1 2\n";
        let m = LinearCode::from_description(text).unwrap();
        assert_eq!(m.kind(), CodeKind::Matrix);
        assert_eq!(LinearCode::from_description(&m.to_description()).unwrap(), m);
        assert!(LinearCode::from_description("q=5\nn=4\nk=2\nkind=matrix\n1 0 1 1\n").is_err());
        assert!(LinearCode::from_description("q=6\nn=4\nk=2\nkind=rs\n").is_err());
    }
}
