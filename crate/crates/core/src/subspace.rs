//! Subspaces of `A_n` kept in reduced row-echelon form.
//!
//! Pivots are the lowest exponent carrying a nonzero coefficient, rows are
//! sorted by pivot, every pivot is 1 and is cleared from all other rows.
//! The form is unique for a given span, so equal subspaces have identical
//! rows regardless of insertion order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf::{Fe, Gf};
use crate::quotient::{coeffs_to_coords, QuotCtx, QuotElt, QuotError};

/// Row-reduced span of vectors of a fixed width over a field.
#[derive(Clone, PartialEq, Eq)]
pub struct RowSpace {
    field: Gf,
    width: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for RowSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RowSpace")
            .field("width", &self.width)
            .field("pivots", &self.pivots)
            .finish()
    }
}

impl RowSpace {
    pub fn new(field: &Gf, width: usize) -> RowSpace {
        RowSpace {
            field: field.clone(),
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    pub fn rows(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residue of `v` after clearing every pivot column.
    pub fn reduce(&self, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.width, "vector width");
        let f = &self.field;
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = r[p];
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (x, &y) in r[p..].iter_mut().zip(&row[p..]) {
                if !y.is_zero() {
                    *x = f.add(*x, f.mul(nc, y));
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Fe]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Adds `v` to the span. Returns `true` if `v` was already contained.
    pub fn insert(&mut self, v: &[Fe]) -> bool {
        let mut r = self.reduce(v);
        let Some(pivot) = r.iter().position(|c| !c.is_zero()) else {
            return true;
        };
        let f = self.field.clone();
        let inv = f.inv(r[pivot]).expect("nonzero pivot");
        for x in r[pivot..].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[pivot];
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (x, &y) in row[pivot..].iter_mut().zip(&r[pivot..]) {
                if !y.is_zero() {
                    *x = f.add(*x, f.mul(nc, y));
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(at, pivot);
        self.rows.insert(at, r);
        false
    }

    pub fn sum(&self, other: &RowSpace) -> RowSpace {
        assert_eq!(self.width, other.width, "vector width");
        let mut out = self.clone();
        for row in &other.rows {
            out.insert(row);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    Absorbed,
    Added,
}

/// A subspace of `A_n` in reduced row-echelon form.
#[derive(Clone, PartialEq, Eq)]
pub struct EchelonBasis {
    ctx: QuotCtx,
    space: RowSpace,
}

impl fmt::Debug for EchelonBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.elements()).finish()
    }
}

impl EchelonBasis {
    pub fn new(ctx: &QuotCtx) -> EchelonBasis {
        EchelonBasis {
            ctx: ctx.clone(),
            space: RowSpace::new(ctx.field(), ctx.dim()),
        }
    }

    pub fn span<'a>(
        ctx: &QuotCtx,
        elts: impl IntoIterator<Item = &'a QuotElt>,
    ) -> Result<EchelonBasis, QuotError> {
        let mut b = EchelonBasis::new(ctx);
        for v in elts {
            b.insert_mut(v)?;
        }
        Ok(b)
    }

    pub fn ctx(&self) -> &QuotCtx {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_full(&self) -> bool {
        self.space.is_full()
    }

    pub fn space(&self) -> &RowSpace {
        &self.space
    }

    pub fn rows(&self) -> &[Vec<Fe>] {
        self.space.rows()
    }

    /// Exponents (1-based) of the pivots.
    pub fn pivot_exponents(&self) -> Vec<usize> {
        self.space.pivots().iter().map(|p| p + 1).collect()
    }

    pub fn elements(&self) -> Vec<QuotElt> {
        self.space
            .rows()
            .iter()
            .map(|r| self.ctx.from_coeffs(r.clone()).expect("row width"))
            .collect()
    }

    fn check(&self, v: &QuotElt) -> Result<(), QuotError> {
        if v.ctx() == &self.ctx {
            Ok(())
        } else {
            Err(QuotError::Mismatch)
        }
    }

    pub fn insert(&self, v: &QuotElt) -> Result<(EchelonBasis, Insert), QuotError> {
        let mut out = self.clone();
        let flag = out.insert_mut(v)?;
        Ok((out, flag))
    }

    pub fn insert_mut(&mut self, v: &QuotElt) -> Result<Insert, QuotError> {
        self.check(v)?;
        Ok(self.insert_raw(v.coeffs()))
    }

    pub(crate) fn insert_raw(&mut self, v: &[Fe]) -> Insert {
        if self.space.insert(v) {
            Insert::Absorbed
        } else {
            Insert::Added
        }
    }

    pub fn contains(&self, v: &QuotElt) -> Result<bool, QuotError> {
        self.check(v)?;
        Ok(self.space.contains(v.coeffs()))
    }

    pub fn contains_raw(&self, v: &[Fe]) -> bool {
        self.space.contains(v)
    }

    pub fn sum(&self, other: &EchelonBasis) -> Result<EchelonBasis, QuotError> {
        if self.ctx != other.ctx {
            return Err(QuotError::Mismatch);
        }
        Ok(EchelonBasis {
            ctx: self.ctx.clone(),
            space: self.space.sum(&other.space),
        })
    }

    /// `true` iff every row of `self` lies in `other`.
    pub fn is_subspace_of(&self, other: &EchelonBasis) -> Result<bool, QuotError> {
        if self.ctx != other.ctx {
            return Err(QuotError::Mismatch);
        }
        Ok(self.rows().iter().all(|r| other.contains_raw(r)))
    }

    /// Rows as coordinate arrays, in pivot order.
    pub fn to_repr(&self) -> BasisRepr {
        BasisRepr(
            self.rows()
                .iter()
                .map(|r| coeffs_to_coords(self.ctx.field(), r))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisRepr(pub Vec<Vec<Vec<u32>>>);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;
    use crate::poly::Poly;

    fn a1() -> QuotCtx {
        QuotCtx::new(&field_make(2, 1).unwrap(), 1).unwrap()
    }

    fn elt(c: &QuotCtx, exps: &[u64]) -> QuotElt {
        c.project(&Poly::sum_of_monomials(c.field(), exps).unwrap())
            .unwrap()
    }

    #[test]
    fn insertion() {
        let c = a1();
        let empty = EchelonBasis::new(&c);
        let (b, flag) = empty.insert(&c.zero()).unwrap();
        assert_eq!((b.dim(), flag), (0, Insert::Absorbed));
        let (b, flag) = empty.insert(&c.x()).unwrap();
        assert_eq!((b.dim(), flag), (1, Insert::Added));

        let b = EchelonBasis::span(&c, [&elt(&c, &[1, 2])]).unwrap();
        let (b, flag) = b.insert(&elt(&c, &[2])).unwrap();
        assert_eq!(flag, Insert::Added);
        assert_eq!(b.elements(), vec![c.x(), elt(&c, &[2])]);
    }

    #[test]
    fn membership_and_sum() {
        let c = a1();
        let w = EchelonBasis::span(&c, [&elt(&c, &[1, 2]), &elt(&c, &[3])]).unwrap();
        assert!(w.contains(&c.zero()).unwrap());
        assert!(w.contains(&elt(&c, &[3])).unwrap());
        assert!(!w.contains(&c.x()).unwrap());
        assert!(!w.is_full());

        let zero = EchelonBasis::new(&c);
        assert_eq!(w.sum(&zero).unwrap(), w);
        assert_eq!(w.sum(&w).unwrap(), w);
        let x = EchelonBasis::span(&c, [&c.x()]).unwrap();
        let full = w.sum(&x).unwrap();
        assert!(full.is_full());
        assert!(!zero.is_full());
    }

    #[test]
    fn mismatch_is_an_error() {
        let c = a1();
        let other = QuotCtx::new(&field_make(3, 1).unwrap(), 1).unwrap();
        let b = EchelonBasis::new(&c);
        assert_eq!(b.contains(&other.x()).unwrap_err(), QuotError::Mismatch);
        assert_eq!(b.sum(&EchelonBasis::new(&other)).unwrap_err(), QuotError::Mismatch);
    }

    #[test]
    fn serialization_is_row_arrays() {
        let c = a1();
        let b = EchelonBasis::span(&c, [&elt(&c, &[2, 3])]).unwrap();
        assert_eq!(serde_json::to_string(&b.to_repr()).unwrap(), "[[[0],[1],[1]]]");
    }
}
