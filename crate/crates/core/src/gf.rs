//! Small finite fields GF(p^e) in polynomial-basis representation.
//!
//! Elements are packed into a single integer: the coordinate vector
//! `(c_0, .., c_{e-1})` is stored as `c_0 + c_1 p + .. + c_{e-1} p^{e-1}`.
//! Fields of order at most 256 carry full addition and multiplication
//! tables; larger fields fall back to coordinate arithmetic.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order accepted by [`field_make`].
pub const MAX_ORDER: u32 = 1 << 16;
const MAX_DEGREE: u32 = 8;
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field too large: {p}^{e} exceeds {MAX_ORDER}")]
    TooLarge { p: u32, e: u32 },
    #[error("extension degree must be in 1..={MAX_DEGREE}, got {0}")]
    BadDegree(u32),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(String, String),
    #[error("invalid field element: {0}")]
    BadElement(String),
    #[error("modulus is not a monic irreducible of the stated degree")]
    BadModulus,
}

/// Defining data of a field: characteristic, degree and modulus
/// (coefficients low degree first, monic, length `e + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn q(&self) -> u32 {
        self.p.pow(self.e)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.e, self.modulus)
    }
}

/// Packed field element. Only meaningful together with its [`Gf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    spec: FieldSpec,
    q: u32,
    tables: Option<Tables>,
}

/// A finite field context. Cloning is cheap.
#[derive(Clone)]
pub struct Gf(Arc<Inner>);

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf({})", self.0.spec)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Gf {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds GF(p^e) using the lexicographically least monic irreducible of
/// degree `e` (coefficient tuples compared constant term first).
pub fn field_make(p: u32, e: u32) -> Result<Gf, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if e == 0 || e > MAX_DEGREE {
        return Err(GfError::BadDegree(e));
    }
    match p.checked_pow(e) {
        Some(q) if q <= MAX_ORDER => {}
        _ => return Err(GfError::TooLarge { p, e }),
    }
    let modulus = least_irreducible(p, e);
    Ok(Gf::build(FieldSpec { p, e, modulus }))
}

/// Rebuilds a field from a serialized spec, validating the modulus.
pub fn field_from_spec(spec: &FieldSpec) -> Result<Gf, GfError> {
    if !is_prime(spec.p) {
        return Err(GfError::NotPrime(spec.p));
    }
    if spec.e == 0 || spec.e > MAX_DEGREE {
        return Err(GfError::BadDegree(spec.e));
    }
    match spec.p.checked_pow(spec.e) {
        Some(q) if q <= MAX_ORDER => {}
        _ => return Err(GfError::TooLarge { p: spec.p, e: spec.e }),
    }
    let m = &spec.modulus;
    if m.len() != spec.e as usize + 1
        || m[spec.e as usize] != 1
        || m.iter().any(|&c| c >= spec.p)
        || !is_irreducible(spec.p, m)
    {
        return Err(GfError::BadModulus);
    }
    Ok(Gf::build(spec.clone()))
}

// Polynomials over GF(p) as coefficient vectors, low degree first.

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    // m is monic
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - (lead * c) % p) % p;
        }
        r = trim(r);
    }
    r
}

fn is_irreducible(p: u32, m: &[u32]) -> bool {
    let deg = m.len() - 1;
    if deg == 1 {
        return true;
    }
    // trial division by every monic polynomial of degree 1..=deg/2
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                div.push(v % p);
                v /= p;
            }
            div.push(1);
            if poly_rem(p, m, &div).is_empty() {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    let e = e as usize;
    // c_0 is the most significant key
    let count = p.pow(e as u32);
    for idx in 0..count {
        let mut coeffs = vec![0u32; e + 1];
        let mut v = idx;
        for slot in (0..e).rev() {
            coeffs[slot] = v % p;
            v /= p;
        }
        coeffs[e] = 1;
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Gf {
    fn build(spec: FieldSpec) -> Gf {
        let q = spec.q();
        let mut inner = Inner {
            spec,
            q,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0u32; n * n];
            let mut mul = vec![0u32; n * n];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = inner.slow_add(a, b);
                    mul[(a * q + b) as usize] = inner.slow_mul(a, b);
                }
            }
            let neg = (0..q).map(|a| inner.slow_neg(a)).collect();
            let mut inv = vec![0u32; n];
            for a in 1..q {
                inv[a as usize] = (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap();
            }
            inner.tables = Some(Tables { add, mul, neg, inv });
        }
        Gf(Arc::new(inner))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u32 {
        self.0.spec.p
    }

    pub fn e(&self) -> u32 {
        self.0.spec.e
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q()).map(Fe)
    }

    /// Image of an integer under the prime-field embedding.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Fe, GfError> {
        let p = self.p();
        if coords.len() != self.e() as usize || coords.iter().any(|&c| c >= p) {
            return Err(GfError::BadElement(format!("{coords:?} for {}", self.spec())));
        }
        Ok(Fe(coords.iter().rev().fold(0, |acc, &c| acc * p + c)))
    }

    pub fn coords(&self, a: Fe) -> Vec<u32> {
        self.0.coords(a.0)
    }

    pub fn is_valid(&self, a: Fe) -> bool {
        a.0 < self.q()
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.0.tables {
            Some(t) => Fe(t.add[(a.0 * self.0.q + b.0) as usize]),
            None => Fe(self.0.slow_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        match &self.0.tables {
            Some(t) => Fe(t.neg[a.0 as usize]),
            None => Fe(self.0.slow_neg(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.0.tables {
            Some(t) => Fe(t.mul[(a.0 * self.0.q + b.0) as usize]),
            None => Fe(self.0.slow_mul(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, GfError> {
        if a.is_zero() {
            return Err(GfError::ZeroInverse);
        }
        match &self.0.tables {
            Some(t) => Ok(Fe(t.inv[a.0 as usize])),
            // a^(q-2)
            None => Ok(self.pow(a, u64::from(self.q()) - 2)),
        }
    }

    pub fn pow(&self, a: Fe, mut m: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while m > 0 {
            if m & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            m >>= 1;
        }
        acc
    }

    /// Checked wrapper pairing a packed value with this field.
    pub fn element(&self, a: Fe) -> Result<FieldElement, GfError> {
        if !self.is_valid(a) {
            return Err(GfError::BadElement(format!("{} not below {}", a.0, self.q())));
        }
        Ok(FieldElement {
            field: self.clone(),
            value: a,
        })
    }

    pub(crate) fn check_same(&self, other: &Gf) -> Result<(), GfError> {
        if self == other {
            Ok(())
        } else {
            Err(GfError::Mismatch(
                self.spec().to_string(),
                other.spec().to_string(),
            ))
        }
    }
}

impl Inner {
    fn coords(&self, mut v: u32) -> Vec<u32> {
        let p = self.spec.p;
        (0..self.spec.e)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    fn pack(&self, coords: &[u32]) -> u32 {
        let p = self.spec.p;
        coords.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.p;
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
        self.pack(&sum)
    }

    fn slow_neg(&self, a: u32) -> u32 {
        let p = self.spec.p;
        let c: Vec<u32> = self.coords(a).iter().map(|x| (p - x) % p).collect();
        self.pack(&c)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.p;
        let e = self.spec.e as usize;
        let (ca, cb) = (self.coords(a), self.coords(b));
        let mut prod = vec![0u32; 2 * e - 1];
        for (i, x) in ca.iter().enumerate() {
            for (j, y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let mut r = poly_rem(p, &prod, &self.spec.modulus);
        r.resize(e, 0);
        self.pack(&r)
    }
}

/// A field element bound to its field; arithmetic checks that both
/// operands live in the same field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Gf,
    value: Fe,
}

impl FieldElement {
    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn wrap(&self, value: Fe) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.field.check_same(&other.field)?;
        Ok(self.wrap(self.field.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.field.check_same(&other.field)?;
        Ok(self.wrap(self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElement, GfError> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    pub fn pow(&self, m: u64) -> FieldElement {
        self.wrap(self.field.pow(self.value, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(f: &Gf, coords: &[u32]) -> FieldElement {
        f.element(f.from_coords(coords).unwrap()).unwrap()
    }

    #[test]
    fn make_prime_and_small_extensions() {
        let f2 = field_make(2, 1).unwrap();
        assert_eq!(f2.spec().modulus, vec![0, 1]);
        assert_eq!(f2.q(), 2);
        assert_eq!(field_make(2, 2).unwrap().spec().modulus, vec![1, 1, 1]);
        // x^2 + 1 has no root mod 3, and every candidate with c_0 = 0 is divisible by x
        assert_eq!(field_make(3, 2).unwrap().spec().modulus, vec![1, 0, 1]);
    }

    #[test]
    fn least_quadratic_over_gf3_by_root_search() {
        let mut expected = None;
        'outer: for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                if (0..3u32).all(|x| (x * x + c1 * x + c0) % 3 != 0) {
                    expected = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        assert_eq!(Some(field_make(3, 2).unwrap().spec().modulus.clone()), expected);
    }

    #[test]
    fn make_rejects_bad_input() {
        assert_eq!(field_make(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert!(matches!(field_make(2, 17), Err(GfError::BadDegree(17))));
        assert!(matches!(field_make(257, 2), Err(GfError::TooLarge { .. })));
        assert!(field_make(2, 16).is_err());
        assert!(field_make(251, 2).is_ok());
    }

    #[test]
    fn make_is_deterministic() {
        for (p, e) in [(2, 3), (3, 2), (5, 2), (2, 8), (7, 3)] {
            assert_eq!(field_make(p, e).unwrap().spec(), field_make(p, e).unwrap().spec());
        }
    }

    #[test]
    fn small_products_and_inverses() {
        let f2 = field_make(2, 1).unwrap();
        assert_eq!(el(&f2, &[1]).mul(&el(&f2, &[1])).unwrap().coords(), vec![1]);
        let f3 = field_make(3, 1).unwrap();
        assert_eq!(el(&f3, &[2]).mul(&el(&f3, &[2])).unwrap().coords(), vec![1]);
        assert_eq!(el(&f3, &[2]).inv().unwrap().coords(), vec![2]);
        let f5 = field_make(5, 1).unwrap();
        assert_eq!(el(&f5, &[3]).inv().unwrap().coords(), vec![2]);

        let f4 = field_make(2, 2).unwrap();
        let w = el(&f4, &[0, 1]);
        assert_eq!(w.mul(&w).unwrap().coords(), vec![1, 1]);
        assert_eq!(w.inv().unwrap().coords(), vec![1, 1]);
        assert_eq!(w.pow(3).coords(), vec![1, 0]);
    }

    #[test]
    fn zero_inverse_and_mismatch() {
        let f3 = field_make(3, 1).unwrap();
        assert_eq!(el(&f3, &[0]).inv().unwrap_err(), GfError::ZeroInverse);
        let f5 = field_make(5, 1).unwrap();
        assert!(matches!(
            el(&f3, &[1]).mul(&el(&f5, &[1])),
            Err(GfError::Mismatch(..))
        ));
        assert!(f3.from_coords(&[3]).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = field_make(p, e).unwrap();
            let els: Vec<Fe> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.pow(a, u64::from(f.q())), a);
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                    assert_eq!(f.pow(a, 0), Fe::ONE);
                }
                for &b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    let frob = |x| f.pow(x, u64::from(p));
                    assert_eq!(frob(f.add(a, b)), f.add(frob(a), frob(b)));
                    for &c in &els {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn untabled_field_agrees_with_fermat() {
        let f = field_make(257, 1).unwrap();
        for a in [1u32, 2, 100, 256] {
            let a = Fe(a);
            assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
        }
        let f = field_make(3, 6).unwrap();
        assert!(f.q() > TABLE_LIMIT);
        let a = f.from_coords(&[1, 2, 0, 1, 0, 2]).unwrap();
        assert_eq!(f.pow(a, u64::from(f.q())), a);
        assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
    }

    #[test]
    fn spec_round_trip_validates_modulus() {
        let f = field_make(3, 2).unwrap();
        let json = serde_json::to_string(f.spec()).unwrap();
        assert_eq!(json, r#"{"p":3,"e":2,"modulus":[1,0,1]}"#);
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(field_from_spec(&back).unwrap(), f);
        let bad = FieldSpec { p: 3, e: 2, modulus: vec![0, 0, 1] };
        assert_eq!(field_from_spec(&bad).unwrap_err(), GfError::BadModulus);
    }
}
