//! Polynomials with zero constant term over GF(q): the one-generator free
//! algebra, stored as a sparse exponent -> coefficient map.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Fe, Gf, GfError};

/// Largest degree a product or composition may produce.
pub const DEGREE_LIMIT: u64 = 1 << 31;
/// Compositions expand powers densely; keep them small.
pub const COMPOSE_DEGREE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("degree {0} exceeds the exponent guard")]
    Overflow(u64),
    #[error("degree must be at least 1")]
    BadDegree,
    #[error("field order must be at least 2")]
    BadOrder,
    #[error("malformed polynomial: {0}")]
    Malformed(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Gf,
    terms: BTreeMap<u64, Fe>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if self.field.e() == 1 {
                c.0.to_string()
            } else {
                format!("{:?}", self.field.coords(c))
            };
            match (c == Fe::ONE, e) {
                (true, 1) => write!(f, "x")?,
                (true, _) => write!(f, "x^{e}")?,
                (false, 1) => write!(f, "{coeff}*x")?,
                (false, _) => write!(f, "{coeff}*x^{e}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero(field: &Gf) -> Poly {
        Poly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn x(field: &Gf) -> Poly {
        Poly::monomial(field, 1, Fe::ONE).unwrap()
    }

    pub fn monomial(field: &Gf, exp: u64, coeff: Fe) -> Result<Poly, PolyError> {
        Poly::from_terms(field, [(exp, coeff)])
    }

    /// Sums the given terms; repeated exponents accumulate.
    pub fn from_terms(
        field: &Gf,
        terms: impl IntoIterator<Item = (u64, Fe)>,
    ) -> Result<Poly, PolyError> {
        let mut out = Poly::zero(field);
        for (e, c) in terms {
            if e == 0 {
                return Err(PolyError::ZeroExponent);
            }
            if e > DEGREE_LIMIT {
                return Err(PolyError::Overflow(e));
            }
            if !field.is_valid(c) {
                return Err(GfError::BadElement(format!("{}", c.0)).into());
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Sum of `x^e` over the given exponents, all coefficients one.
    pub fn sum_of_monomials(field: &Gf, exps: &[u64]) -> Result<Poly, PolyError> {
        Poly::from_terms(field, exps.iter().map(|&e| (e, Fe::ONE)))
    }

    pub(crate) fn add_term(&mut self, e: u64, c: Fe) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert(Fe::ZERO);
        *entry = self.field.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, e: u64) -> Fe {
        self.terms.get(&e).copied().unwrap_or(Fe::ZERO)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, Fe)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.field.check_same(&other.field)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly {
            field: f.clone(),
            terms: self.terms.iter().map(|(&e, &c)| (e, f.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Fe) -> Poly {
        let mut out = Poly::zero(&self.field);
        for (e, a) in self.terms() {
            out.add_term(e, self.field.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.field.check_same(&other.field)?;
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return Ok(Poly::zero(&self.field));
        };
        if da + db > DEGREE_LIMIT {
            return Err(PolyError::Overflow(da + db));
        }
        let f = &self.field;
        let mut out = Poly::zero(f);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out.add_term(ea + eb, f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Substitutes `x -> g`, i.e. applies the endomorphism determined by `g`.
    pub fn compose(&self, g: &Poly) -> Result<Poly, PolyError> {
        self.field.check_same(&g.field)?;
        let f = &self.field;
        let (Some(df), Some(dg)) = (self.degree(), g.degree()) else {
            return Ok(Poly::zero(f));
        };
        match df.checked_mul(dg) {
            Some(d) if d <= COMPOSE_DEGREE_LIMIT => {}
            _ => return Err(PolyError::Overflow(df.saturating_mul(dg))),
        }
        let mut out = Poly::zero(f);
        let mut power = g.clone();
        let mut power_exp = 1u64;
        for (e, c) in self.terms() {
            while power_exp < e {
                power = power.mul(g)?;
                power_exp += 1;
            }
            for (pe, pc) in power.terms() {
                out.add_term(pe, f.mul(c, pc));
            }
        }
        Ok(out)
    }

    /// Splits into q-homogeneous components keyed by degree class.
    pub fn q_components(&self) -> BTreeMap<u64, Poly> {
        let q = u64::from(self.field.q());
        let mut out: BTreeMap<u64, Poly> = BTreeMap::new();
        for (e, c) in self.terms() {
            let r = (e - 1) % (q - 1) + 1;
            out.entry(r)
                .or_insert_with(|| Poly::zero(&self.field))
                .add_term(e, c);
        }
        out
    }

    pub fn is_q_homogeneous(&self) -> bool {
        self.q_components().len() <= 1
    }

    pub fn to_repr(&self) -> PolyRepr {
        PolyRepr {
            terms: self
                .terms()
                .map(|(e, c)| (e, self.field.coords(c)))
                .collect(),
        }
    }

    pub fn from_repr(field: &Gf, repr: &PolyRepr) -> Result<Poly, PolyError> {
        let mut terms = Vec::with_capacity(repr.terms.len());
        for (&e, coords) in &repr.terms {
            terms.push((e, field.from_coords(coords)?));
        }
        Poly::from_terms(field, terms)
    }
}

/// Degree class of `x^d` under q-homogeneity: the unique `r` in
/// `1..=q-1` with `d = r (mod q-1)`.
pub fn q_class(d: u64, q: u64) -> Result<u64, PolyError> {
    if d < 1 {
        return Err(PolyError::BadDegree);
    }
    if q < 2 {
        return Err(PolyError::BadOrder);
    }
    Ok((d - 1) % (q - 1) + 1)
}

/// Serialized polynomial: `{"terms": {"<exp>": [coords..], ..}}` with
/// exponent keys written in increasing numeric order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyRepr {
    pub terms: BTreeMap<u64, Vec<u32>>,
}

struct TermMap<'a>(&'a BTreeMap<u64, Vec<u32>>);

impl Serialize for TermMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (e, c) in self.0 {
            map.serialize_entry(&e.to_string(), c)?;
        }
        map.end()
    }
}

impl Serialize for PolyRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("terms", &TermMap(&self.terms))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for PolyRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            terms: RawTerms,
        }
        struct RawTerms(BTreeMap<u64, Vec<u32>>);
        impl<'de> Deserialize<'de> for RawTerms {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = RawTerms;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, "a map from decimal exponents to coordinate arrays")
                    }
                    fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<RawTerms, A::Error> {
                        let mut out = BTreeMap::new();
                        while let Some((k, v)) = m.next_entry::<String, Vec<u32>>()? {
                            let e: u64 = k.parse().map_err(serde::de::Error::custom)?;
                            if out.insert(e, v).is_some() {
                                return Err(serde::de::Error::custom(format!("duplicate exponent {e}")));
                            }
                        }
                        Ok(RawTerms(out))
                    }
                }
                d.deserialize_map(V)
            }
        }
        let raw = Raw::deserialize(d)?;
        Ok(PolyRepr { terms: raw.terms.0 })
    }
}

/// Parses `x + 2*x^3 - x^5`, with extension-field coefficients written as
/// coordinate lists, e.g. `[0,1]*x^2`. Integer coefficients are read in the
/// prime field. The output of `Display` parses back to the same polynomial.
pub fn parse_poly(field: &Gf, src: &str) -> Result<Poly, PolyError> {
    let bad = |msg: &str| PolyError::Malformed(format!("{msg} in {src:?}"));
    let text: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(bad("empty polynomial"));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let (mut start, mut depth, mut negative) = (0usize, 0i32, false);
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 && !text[..i].ends_with('^') => {
                terms.push((negative, &text[start..i]));
                negative = ch == '-';
                start = i + 1;
            }
            '-' if i == 0 => {
                negative = true;
                start = 1;
            }
            _ => {}
        }
    }
    terms.push((negative, &text[start..]));

    let mut out = Poly::zero(field);
    for (negative, term) in terms {
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (coeff, mono) = match term.find('x') {
            Some(pos) => {
                let c = term[..pos].strip_suffix('*').unwrap_or(&term[..pos]);
                (c, &term[pos..])
            }
            None => return Err(bad("constant terms are not allowed")),
        };
        let c = if coeff.is_empty() {
            Fe::ONE
        } else if let Some(inner) = coeff.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coords: Vec<u32> = inner
                .split(',')
                .map(|d| d.parse().map_err(|_| bad("bad coordinate")))
                .collect::<Result<_, _>>()?;
            field.from_coords(&coords)?
        } else {
            let v: i64 = coeff.parse().map_err(|_| bad("bad coefficient"))?;
            field.from_int(v)
        };
        let exp: u64 = match mono.strip_prefix('x') {
            Some("") => 1,
            Some(rest) => rest
                .strip_prefix('^')
                .ok_or_else(|| bad("expected '^'"))?
                .parse()
                .map_err(|_| bad("bad exponent"))?,
            None => return Err(bad("expected 'x'")),
        };
        if exp == 0 {
            return Err(PolyError::ZeroExponent);
        }
        if exp > DEGREE_LIMIT {
            return Err(PolyError::Overflow(exp));
        }
        let c = if negative { field.neg(c) } else { c };
        out.add_term(exp, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;

    fn poly(f: &Gf, exps: &[u64]) -> Poly {
        Poly::sum_of_monomials(f, exps).unwrap()
    }

    #[test]
    fn products() {
        let f2 = field_make(2, 1).unwrap();
        let x = Poly::x(&f2);
        assert_eq!(x.mul(&x).unwrap(), poly(&f2, &[2]));
        let a = poly(&f2, &[1, 2]);
        assert_eq!(a.mul(&a).unwrap(), poly(&f2, &[2, 4]));
        assert!(a.mul(&Poly::zero(&f2)).unwrap().is_zero());
        let f3 = field_make(3, 1).unwrap();
        let b = poly(&f3, &[1, 2]);
        let sq = b.mul(&b).unwrap();
        assert_eq!(sq.coeff(3), Fe(2));
        assert_eq!(sq.degree(), Some(4));
    }

    #[test]
    fn compositions() {
        let f2 = field_make(2, 1).unwrap();
        let a = poly(&f2, &[1, 2]);
        assert_eq!(a.compose(&Poly::x(&f2)).unwrap(), a);
        assert_eq!(a.compose(&poly(&f2, &[2])).unwrap(), poly(&f2, &[2, 4]));
        // (x + x^2)^3 = x^3 + 3x^4 + 3x^5 + x^6
        assert_eq!(poly(&f2, &[3]).compose(&a).unwrap(), poly(&f2, &[3, 4, 5, 6]));
        assert!(a.compose(&Poly::zero(&f2)).unwrap().is_zero());
    }

    #[test]
    fn zero_exponent_and_mismatch_rejected() {
        let f2 = field_make(2, 1).unwrap();
        let f3 = field_make(3, 1).unwrap();
        assert_eq!(Poly::monomial(&f2, 0, Fe::ONE).unwrap_err(), PolyError::ZeroExponent);
        assert!(matches!(
            Poly::x(&f2).mul(&Poly::x(&f3)),
            Err(PolyError::Field(GfError::Mismatch(..)))
        ));
        assert!(matches!(
            poly(&f2, &[1 << 20]).compose(&poly(&f2, &[8])),
            Err(PolyError::Overflow(_))
        ));
    }

    #[test]
    fn parsing() {
        let f3 = field_make(3, 1).unwrap();
        let p = parse_poly(&f3, "x + 2*x^3 - x^5").unwrap();
        assert_eq!(p.coeff(1), Fe::ONE);
        assert_eq!(p.coeff(3), Fe(2));
        assert_eq!(p.coeff(5), Fe(2));
        assert_eq!(parse_poly(&f3, &p.to_string()).unwrap(), p);
        assert_eq!(parse_poly(&f3, "-x").unwrap().coeff(1), Fe(2));
        assert!(parse_poly(&f3, "x + 1").is_err());
        assert!(parse_poly(&f3, "x^0").is_err());
        assert!(parse_poly(&f3, "").is_err());
        let f9 = field_make(3, 2).unwrap();
        let q = parse_poly(&f9, "[0,1]*x^2 + x").unwrap();
        assert_eq!(parse_poly(&f9, &q.to_string()).unwrap(), q);
        assert!(parse_poly(&f9, "[0,1,2]*x").is_err());
    }

    #[test]
    fn classes() {
        assert_eq!(q_class(5, 3).unwrap(), 1);
        assert_eq!(q_class(2, 3).unwrap(), 2);
        assert_eq!(q_class(9, 5).unwrap(), 1);
        assert_eq!(q_class(0, 3).unwrap_err(), PolyError::BadDegree);
    }

    #[test]
    fn components() {
        let f3 = field_make(3, 1).unwrap();
        let comps = poly(&f3, &[1, 2, 5]).q_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&1], poly(&f3, &[1, 5]));
        assert_eq!(comps[&2], poly(&f3, &[2]));
        assert_eq!(poly(&f3, &[2, 4]).q_components().len(), 1);
        assert!(Poly::zero(&f3).q_components().is_empty());
    }

    #[test]
    fn json_keys_are_numeric_order() {
        let f4 = field_make(2, 2).unwrap();
        let w = f4.from_coords(&[0, 1]).unwrap();
        let p = Poly::from_terms(&f4, [(10, Fe::ONE), (2, w)]).unwrap();
        let json = serde_json::to_string(&p.to_repr()).unwrap();
        assert_eq!(json, r#"{"terms":{"2":[0,1],"10":[1,0]}}"#);
        let back: PolyRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(Poly::from_repr(&f4, &back).unwrap(), p);
        let bad: PolyRepr = serde_json::from_str(r#"{"terms":{"0":[1,0]}}"#).unwrap();
        assert!(Poly::from_repr(&f4, &bad).is_err());
    }
}
