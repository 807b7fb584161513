//! The quotient algebras `A_n = k<x>_0 / U_n`, where `U_n` is the T-ideal
//! generated by `x - x^(q^(2n))`.
//!
//! Modulo `U_n` every monomial `x^m` reduces to `x^(((m-1) mod D) + 1)`
//! with `D = q^(2n) - 1`, so `A_n` has the monomial basis `x, .., x^D` and
//! elements are dense coefficient vectors of length `D`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Fe, Gf, GfError};
use crate::poly::{Poly, PolyError};

/// `q^(2n)` must stay at or below this.
pub const EXP_GUARD: u64 = 1 << 31;
/// Dense storage cap on `D`.
pub const MAX_DIM: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("level n must be at least 1")]
    BadLevel,
    #[error("q^(2n) = {0} exceeds the exponent guard")]
    Overflow(String),
    #[error("dimension {0} too large for dense storage")]
    TooLarge(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("quotient context mismatch")]
    Mismatch,
    #[error("coefficient vector has length {got}, expected {want}")]
    BadLength { got: usize, want: usize },
}

struct CtxInner {
    field: Gf,
    n: u32,
    qn: u64,
    dim: usize,
}

/// Context for `A_n` over a fixed field. Cloning is cheap.
#[derive(Clone)]
pub struct QuotCtx(Arc<CtxInner>);

impl fmt::Debug for QuotCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A_{}(q={}, D={})", self.n(), self.q(), self.dim())
    }
}

impl PartialEq for QuotCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.n == other.0.n && self.0.field == other.0.field)
    }
}

impl Eq for QuotCtx {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtxTag {
    pub q: u32,
    pub n: u32,
}

impl QuotCtx {
    pub fn new(field: &Gf, n: u32) -> Result<QuotCtx, QuotError> {
        if n == 0 {
            return Err(QuotError::BadLevel);
        }
        let q = u64::from(field.q());
        let overflow = || QuotError::Overflow(format!("{q}^{}", 2 * n));
        let qn = q.checked_pow(n).ok_or_else(overflow)?;
        let q2n = qn.checked_mul(qn).ok_or_else(overflow)?;
        if q2n > EXP_GUARD {
            return Err(overflow());
        }
        let dim = q2n - 1;
        if dim > MAX_DIM {
            return Err(QuotError::TooLarge(dim));
        }
        Ok(QuotCtx(Arc::new(CtxInner {
            field: field.clone(),
            n,
            qn,
            dim: dim as usize,
        })))
    }

    pub fn field(&self) -> &Gf {
        &self.0.field
    }

    pub fn n(&self) -> u32 {
        self.0.n
    }

    pub fn q(&self) -> u32 {
        self.0.field.q()
    }

    /// `q^n`.
    pub fn qn(&self) -> u64 {
        self.0.qn
    }

    /// `D = q^(2n) - 1`.
    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn tag(&self) -> CtxTag {
        CtxTag {
            q: self.q(),
            n: self.n(),
        }
    }

    /// Exponent normal form: `((m - 1) mod D) + 1`.
    pub fn nf_exp(&self, m: u64) -> Result<u64, QuotError> {
        if m < 1 {
            return Err(QuotError::ZeroExponent);
        }
        Ok(self.fold(m))
    }

    #[inline]
    fn fold(&self, m: u64) -> u64 {
        (m - 1) % self.dim() as u64 + 1
    }

    pub fn zero(&self) -> QuotElt {
        QuotElt {
            ctx: self.clone(),
            coeffs: vec![Fe::ZERO; self.dim()],
        }
    }

    /// Residue of `x^m`, `m >= 1`.
    pub fn monomial(&self, m: u64) -> Result<QuotElt, QuotError> {
        let mut out = self.zero();
        out.coeffs[self.nf_exp(m)? as usize - 1] = Fe::ONE;
        Ok(out)
    }

    pub fn x(&self) -> QuotElt {
        self.monomial(1).unwrap()
    }

    pub fn from_coeffs(&self, coeffs: Vec<Fe>) -> Result<QuotElt, QuotError> {
        if coeffs.len() != self.dim() {
            return Err(QuotError::BadLength {
                got: coeffs.len(),
                want: self.dim(),
            });
        }
        if let Some(bad) = coeffs.iter().find(|&&c| !self.field().is_valid(c)) {
            return Err(GfError::BadElement(bad.0.to_string()).into());
        }
        Ok(QuotElt {
            ctx: self.clone(),
            coeffs,
        })
    }

    pub fn project(&self, f: &Poly) -> Result<QuotElt, QuotError> {
        self.field().check_same(f.field())?;
        let mut out = self.zero();
        let fld = self.field();
        for (e, c) in f.terms() {
            let slot = &mut out.coeffs[self.fold(e) as usize - 1];
            *slot = fld.add(*slot, c);
        }
        Ok(out)
    }

    /// Total number of elements `q^D`, if it fits in a `u128`.
    pub fn cardinality(&self) -> Option<u128> {
        u128::from(self.q()).checked_pow(self.dim() as u32)
    }

    /// The `idx`-th element in lexicographic order of coefficient vectors
    /// (coefficient of `x` most significant, zero vector first).
    pub fn element_at(&self, mut idx: u128) -> QuotElt {
        let q = u128::from(self.q());
        let mut coeffs = vec![Fe::ZERO; self.dim()];
        for slot in coeffs.iter_mut().rev() {
            *slot = Fe((idx % q) as u32);
            idx /= q;
        }
        QuotElt {
            ctx: self.clone(),
            coeffs,
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> QuotElt {
        let q = self.q();
        QuotElt {
            ctx: self.clone(),
            coeffs: (0..self.dim()).map(|_| Fe(rng.gen_range(0..q))).collect(),
        }
    }

    /// Raw product of two coefficient vectors in this algebra.
    pub fn mul_raw(&self, a: &[Fe], b: &[Fe], out: &mut [Fe]) {
        let d = self.dim();
        let f = self.field();
        out.iter_mut().for_each(|c| *c = Fe::ZERO);
        for (i, &ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            // x^(i+1) * x^(j+1) = x^(i+j+2), folded
            for (j, &cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let mut k = i + j + 1;
                if k >= d {
                    k -= d;
                }
                out[k] = f.add(out[k], f.mul(ca, cb));
            }
        }
    }

    /// `s, s^2, .., s^k` as raw vectors.
    pub fn powers_raw(&self, s: &[Fe], k: usize) -> Vec<Vec<Fe>> {
        let mut out: Vec<Vec<Fe>> = Vec::with_capacity(k);
        if k == 0 {
            return out;
        }
        out.push(s.to_vec());
        for i in 1..k {
            let mut next = vec![Fe::ZERO; self.dim()];
            self.mul_raw(&out[i - 1], s, &mut next);
            out.push(next);
        }
        out
    }

    /// `sum_i f_i s^i` given precomputed powers (`powers[i-1] = s^i`).
    pub fn eval_with_powers(&self, f: &[Fe], powers: &[Vec<Fe>]) -> Vec<Fe> {
        let fld = self.field();
        let mut out = vec![Fe::ZERO; self.dim()];
        for (i, &c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(&powers[i]) {
                if !v.is_zero() {
                    *o = fld.add(*o, fld.mul(c, v));
                }
            }
        }
        out
    }
}

/// Highest exponent with a nonzero coefficient, or 0.
pub fn top_exp(v: &[Fe]) -> usize {
    v.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1)
}

/// An element of `A_n`; `coeffs[i]` is the coefficient of `x^(i+1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct QuotElt {
    ctx: QuotCtx,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for QuotElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lift())
    }
}

impl QuotElt {
    pub fn ctx(&self) -> &QuotCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fe> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Canonical representative of degree at most `D`.
    pub fn lift(&self) -> Poly {
        Poly::from_terms(
            self.ctx.field(),
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as u64 + 1, c)),
        )
        .expect("coefficients are valid")
    }

    fn same_ctx(&self, other: &QuotElt) -> Result<(), QuotError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(QuotError::Mismatch)
        }
    }

    pub fn add(&self, other: &QuotElt) -> Result<QuotElt, QuotError> {
        self.same_ctx(other)?;
        let f = self.ctx.field();
        Ok(QuotElt {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &QuotElt) -> Result<QuotElt, QuotError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QuotElt {
        self.scale(self.ctx.field().neg(Fe::ONE))
    }

    pub fn scale(&self, c: Fe) -> QuotElt {
        let f = self.ctx.field();
        QuotElt {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &QuotElt) -> Result<QuotElt, QuotError> {
        self.same_ctx(other)?;
        let mut out = vec![Fe::ZERO; self.ctx.dim()];
        self.ctx.mul_raw(&self.coeffs, &other.coeffs, &mut out);
        Ok(QuotElt {
            ctx: self.ctx.clone(),
            coeffs: out,
        })
    }

    pub fn pow(&self, m: u64) -> Result<QuotElt, QuotError> {
        if m == 0 {
            return Err(QuotError::ZeroExponent);
        }
        let mut base = self.clone();
        let mut acc: Option<QuotElt> = None;
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base)?,
                    None => base.clone(),
                });
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap())
    }

    /// Applies the endomorphism `x -> g` to `self`.
    pub fn compose(&self, g: &QuotElt) -> Result<QuotElt, QuotError> {
        self.same_ctx(g)?;
        let top = top_exp(&self.coeffs);
        let powers = self.ctx.powers_raw(&g.coeffs, top);
        Ok(QuotElt {
            ctx: self.ctx.clone(),
            coeffs: self.ctx.eval_with_powers(&self.coeffs[..top], &powers),
        })
    }

    pub fn to_repr(&self) -> QuotEltRepr {
        QuotEltRepr {
            ctx: self.ctx.tag(),
            coeffs: coeffs_to_coords(self.ctx.field(), &self.coeffs),
        }
    }
}

pub fn coeffs_to_coords(field: &Gf, coeffs: &[Fe]) -> Vec<Vec<u32>> {
    coeffs.iter().map(|&c| field.coords(c)).collect()
}

pub fn coords_to_coeffs(field: &Gf, coords: &[Vec<u32>]) -> Result<Vec<Fe>, GfError> {
    coords.iter().map(|c| field.from_coords(c)).collect()
}

/// Serialized element: `{"ctx":{"q":..,"n":..},"coeffs":[[..],..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotEltRepr {
    pub ctx: CtxTag,
    pub coeffs: Vec<Vec<u32>>,
}

impl QuotEltRepr {
    pub fn decode(&self, ctx: &QuotCtx) -> Result<QuotElt, QuotError> {
        if self.ctx != ctx.tag() {
            return Err(QuotError::Mismatch);
        }
        ctx.from_coeffs(coords_to_coeffs(ctx.field(), &self.coeffs)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;

    fn ctx(p: u32, e: u32, n: u32) -> QuotCtx {
        QuotCtx::new(&field_make(p, e).unwrap(), n).unwrap()
    }

    fn elt(c: &QuotCtx, exps: &[u64]) -> QuotElt {
        c.project(&Poly::sum_of_monomials(c.field(), exps).unwrap())
            .unwrap()
    }

    #[test]
    fn normal_form() {
        let a1 = ctx(2, 1, 1);
        assert_eq!(a1.dim(), 3);
        assert_eq!(a1.nf_exp(4).unwrap(), 1);
        assert_eq!(a1.nf_exp(3).unwrap(), 3);
        assert_eq!(a1.nf_exp(0).unwrap_err(), QuotError::ZeroExponent);
        let b1 = ctx(3, 1, 1);
        assert_eq!(b1.nf_exp(9).unwrap(), 1);
        for m in 1..=40 {
            assert_eq!(b1.nf_exp(m + 8).unwrap(), b1.nf_exp(m).unwrap());
            if m <= 8 {
                assert_eq!(b1.nf_exp(m).unwrap(), m);
            }
        }
    }

    #[test]
    fn projection() {
        let a1 = ctx(2, 1, 1);
        assert!(elt(&a1, &[1, 4]).is_zero());
        assert_eq!(elt(&a1, &[5]), a1.monomial(2).unwrap());
        assert_eq!(elt(&a1, &[1, 3]).lift(), Poly::sum_of_monomials(a1.field(), &[1, 3]).unwrap());
        // (x^4 - x) x^i projects to zero for every i
        let f = a1.field();
        let gen = Poly::from_terms(f, [(4, Fe::ONE), (1, f.neg(Fe::ONE))]).unwrap();
        for i in 0..10 {
            let shifted = if i == 0 {
                gen.clone()
            } else {
                gen.mul(&Poly::monomial(f, i, Fe::ONE).unwrap()).unwrap()
            };
            assert!(a1.project(&shifted).unwrap().is_zero());
        }
    }

    #[test]
    fn products() {
        let a1 = ctx(2, 1, 1);
        let x2 = a1.monomial(2).unwrap();
        assert_eq!(x2.mul(&x2).unwrap(), a1.x());
        assert!(x2.mul(&a1.zero()).unwrap().is_zero());
        let b1 = ctx(3, 1, 1);
        let x5 = b1.monomial(5).unwrap();
        assert_eq!(x5.mul(&x5).unwrap(), b1.monomial(2).unwrap());
        assert_eq!(a1.x().mul(&b1.x()).unwrap_err(), QuotError::Mismatch);
    }

    #[test]
    fn compositions() {
        let a1 = ctx(2, 1, 1);
        let s = elt(&a1, &[1, 2]);
        assert_eq!(s.compose(&a1.x()).unwrap(), s);
        assert!(s.compose(&s).unwrap().is_zero());
        assert_eq!(a1.monomial(3).unwrap().compose(&s).unwrap(), s);
        assert!(s.compose(&a1.zero()).unwrap().is_zero());
    }

    #[test]
    fn monomial_algebra_exhaustive_q2_n1() {
        let a1 = ctx(2, 1, 1);
        let all: Vec<QuotElt> = (0..8).map(|i| a1.element_at(i)).collect();
        for a in &all {
            for b in &all {
                assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                for c in &all {
                    assert_eq!(
                        a.mul(b).unwrap().mul(c).unwrap(),
                        a.mul(&b.mul(c).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn frobenius_collapse() {
        for (p, e, n) in [(2, 1, 1), (3, 1, 1), (2, 1, 2), (2, 2, 1)] {
            let c = ctx(p, e, n);
            let q2n = c.dim() as u64 + 1;
            for m in 1..=c.dim() as u64 {
                let xm = c.monomial(m).unwrap();
                assert_eq!(xm.pow(q2n).unwrap(), xm);
            }
        }
    }

    #[test]
    fn enumeration_order_and_guards() {
        let a1 = ctx(2, 1, 1);
        assert!(a1.element_at(0).is_zero());
        assert_eq!(a1.element_at(1), a1.monomial(3).unwrap());
        assert_eq!(a1.element_at(4), a1.x());
        assert_eq!(a1.cardinality(), Some(8));
        let f2 = field_make(2, 1).unwrap();
        assert!(matches!(QuotCtx::new(&f2, 16), Err(QuotError::Overflow(_))));
        assert_eq!(QuotCtx::new(&f2, 0).unwrap_err(), QuotError::BadLevel);
        assert!(matches!(QuotCtx::new(&f2, 11), Err(QuotError::TooLarge(_))));
    }

    #[test]
    fn repr_round_trip() {
        let c = ctx(3, 1, 1);
        let v = elt(&c, &[1, 5, 8]);
        let json = serde_json::to_string(&v.to_repr()).unwrap();
        assert!(json.starts_with(r#"{"ctx":{"q":3,"n":1},"coeffs":[[1],[0]"#));
        let back: QuotEltRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(back.decode(&c).unwrap(), v);
        assert_eq!(back.decode(&ctx(2, 1, 1)).unwrap_err(), QuotError::Mismatch);
    }
}
