//! Prime-field arithmetic and vectors over `F_q`.
//!
//! Elements are kept in canonical form `0 <= value < q`. Moduli up to
//! `2^61 - 1` are supported; products are formed in `u128`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported modulus (the Mersenne prime `2^61 - 1`).
pub const MAX_MODULUS: u64 = (1 << 61) - 1;

/// The prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&q) || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Element with value `v mod q`.
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.q,
            q: self.q,
        }
    }

    /// Element from an already-canonical value; rejects `v >= q`.
    pub fn canonical(&self, v: u64) -> Result<FieldElement> {
        if v >= self.q {
            return Err(Error::Parameter(format!("value {v} is not below q={}", self.q)));
        }
        Ok(FieldElement { value: v, q: self.q })
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// Iterates over all `q` elements in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| FieldElement { value: v, q: self.q })
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.q as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.q - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.q;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.q as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.q as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// Deterministic Miller-Rabin; the fixed base set is exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of `F_q`, always in canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    q: u64,
}

/// The four field operations, for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies `op` to two elements of the same field.
pub fn field_arith(a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
    let field = a.same_field(&b)?;
    let value = match op {
        ArithOp::Add => field.add(a.value, b.value),
        ArithOp::Sub => field.sub(a.value, b.value),
        ArithOp::Mul => field.mul(a.value, b.value),
        ArithOp::Div => field.div(a.value, b.value)?,
    };
    Ok(FieldElement { value, q: a.q })
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { q: self.q }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<PrimeField> {
        if self.q != other.q {
            return Err(Error::MismatchedFields {
                left: self.q,
                right: other.q,
            });
        }
        Ok(PrimeField { q: self.q })
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        field_arith(self, rhs, ArithOp::Add)
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        field_arith(self, rhs, ArithOp::Sub)
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        field_arith(self, rhs, ArithOp::Mul)
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        field_arith(self, rhs, ArithOp::Div)
    }

    pub fn inverse(self) -> Result<Self> {
        let value = self.field().inv(self.value)?;
        Ok(Self { value, q: self.q })
    }

    /// 8-byte big-endian wire encoding.
    pub fn to_be_bytes(&self) -> [u8; 8] {
        self.value.to_be_bytes()
    }

    /// Decodes the 8-byte big-endian form, rejecting non-canonical values.
    pub fn from_be_bytes(field: PrimeField, bytes: [u8; 8]) -> Result<Self> {
        field.canonical(u64::from_be_bytes(bytes))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on mismatched fields; use the `try_*` methods when the
// operands are not known to share a field.
impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("operands over different fields")
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(rhs).expect("operands over different fields")
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("operands over different fields")
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.field().neg(self.value),
            q: self.q,
        }
    }
}

/// A vector over a single prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldVector {
    field: PrimeField,
    values: Vec<u64>,
}

impl FieldVector {
    /// Builds a vector, reducing every value modulo `q`.
    pub fn from_values(field: PrimeField, values: impl IntoIterator<Item = u64>) -> Self {
        let q = field.modulus();
        Self {
            field,
            values: values.into_iter().map(|v| v % q).collect(),
        }
    }

    /// Builds a vector from canonical values, rejecting any `v >= q`.
    pub fn from_canonical(field: PrimeField, values: Vec<u64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v >= field.modulus()) {
            return Err(Error::Parameter(format!(
                "value {v} is not below q={}",
                field.modulus()
            )));
        }
        Ok(Self { field, values })
    }

    pub fn from_elements(field: PrimeField, elems: &[FieldElement]) -> Result<Self> {
        let mut values = Vec::with_capacity(elems.len());
        for e in elems {
            if e.q != field.modulus() {
                return Err(Error::MismatchedFields {
                    left: field.modulus(),
                    right: e.q,
                });
            }
            values.push(e.value);
        }
        Ok(Self { field, values })
    }

    pub fn zero(field: PrimeField, len: usize) -> Self {
        Self {
            field,
            values: vec![0; len],
        }
    }

    /// The `i`-th standard basis vector (0-based position).
    pub fn unit(field: PrimeField, len: usize, i: usize) -> Self {
        let mut v = Self::zero(field, len);
        v.values[i] = 1;
        v
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u64> {
        self.values
    }

    /// Element at 0-based position `i`.
    pub fn get(&self, i: usize) -> FieldElement {
        FieldElement {
            value: self.values[i],
            q: self.field.modulus(),
        }
    }

    pub fn set(&mut self, i: usize, e: FieldElement) -> Result<()> {
        if e.q != self.field.modulus() {
            return Err(Error::MismatchedFields {
                left: self.field.modulus(),
                right: e.q,
            });
        }
        self.values[i] = e.value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let q = self.field.modulus();
        self.values.iter().map(move |&value| FieldElement { value, q })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MismatchedFields {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// `sum u_i v_i` in `F_q`.
    pub fn dot(&self, other: &Self) -> Result<FieldElement> {
        self.compatible(other)?;
        Ok(self.field.elem(self.dot_unchecked(&other.values)))
    }

    /// Dot product against raw canonical values of the same field and length.
    pub(crate) fn dot_unchecked(&self, other: &[u64]) -> u64 {
        let q = self.field.modulus() as u128;
        let mut acc: u128 = 0;
        for (&a, &b) in self.values.iter().zip(other) {
            acc = (acc + a as u128 * b as u128) % q;
        }
        acc as u64
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = self.field;
        Ok(Self {
            field: f,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = self.field;
        Ok(Self {
            field: f,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: FieldElement) -> Result<Self> {
        if c.q != self.field.modulus() {
            return Err(Error::MismatchedFields {
                left: self.field.modulus(),
                right: c.q,
            });
        }
        let f = self.field;
        Ok(Self {
            field: f,
            values: self.values.iter().map(|&a| f.mul(a, c.value)).collect(),
        })
    }

    pub fn weight(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }
}

impl fmt::Debug for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.values)
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Number of nonzero coordinates.
pub fn hamming_weight(v: &FieldVector) -> usize {
    v.weight()
}

/// Hamming distance between two field vectors of equal length.
pub fn hamming_dist(u: &FieldVector, v: &FieldVector) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(hamming(u.values(), v.values()))
}

/// Hamming distance over any alphabet; slices must have equal length.
pub fn hamming<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
