//! Explicit generators and bases: the generators of `W_n`, the basis of
//! `U_n`, the sets `E_n` and `Y_n`, the homogeneous slices of `Y_1`, and
//! the rewriting that brings `F(i, j)` into range modulo `U_n`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Fe, Gf};
use crate::poly::{Poly, PolyError};
use crate::quotient::EXP_GUARD;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("q^(2n) exceeds the exponent guard for q = {q}, n = {n}")]
    Overflow { q: u64, n: u32 },
    #[error("count must be at least 1")]
    EmptyCount,
    #[error("class r = {r} outside 1..={max}")]
    BadClass { r: u64, max: u64 },
    #[error("invalid pair F({i}, {j}): need i >= j >= 0 and i + j > 0")]
    BadPair { i: u64, j: u64 },
}

/// `q^n`, refusing levels whose `q^(2n)` leaves the exponent guard.
pub fn level_order(q: u64, n: u32) -> Result<u64, ConstructionError> {
    let err = ConstructionError::Overflow { q, n };
    let qn = q.checked_pow(n).ok_or(err.clone())?;
    match qn.checked_mul(qn) {
        Some(q2n) if q2n <= EXP_GUARD && n >= 1 => Ok(qn),
        _ => Err(err),
    }
}

/// `[x + x^(q^n), x^(q^n + 1)]`.
pub fn wn_generators(field: &Gf, n: u32) -> Result<Vec<Poly>, ConstructionError> {
    let qn = level_order(field.q().into(), n)?;
    Ok(vec![
        Poly::sum_of_monomials(field, &[1, qn])?,
        Poly::sum_of_monomials(field, &[qn + 1])?,
    ])
}

/// The first `count` elements `(x^(q^(2n)) - x) x^i`, `i = 0, 1, ..`.
pub fn un_basis(field: &Gf, n: u32, count: usize) -> Result<Vec<Poly>, ConstructionError> {
    if count == 0 {
        return Err(ConstructionError::EmptyCount);
    }
    let qn = level_order(field.q().into(), n)?;
    let q2n = qn * qn;
    let minus_one = field.neg(Fe::ONE);
    (0..count as u64)
        .map(|i| Ok(Poly::from_terms(field, [(q2n + i, Fe::ONE), (1 + i, minus_one)])?))
        .collect()
}

/// Index pair of `F(i, j)`. For `i != j` the element is
/// `x^(i q^n + j) + x^(i + j q^n)`; for `i == j` it is `(x^(q^n + 1))^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FPair {
    pub i: u64,
    pub j: u64,
}

impl FPair {
    pub fn new(i: u64, j: u64) -> FPair {
        FPair { i, j }
    }

    /// Exponents of the (one or two) monomials of `F(i, j)` at level `qn`.
    pub fn exponents(&self, qn: u64) -> Vec<u64> {
        if self.i == self.j {
            vec![self.i * (qn + 1)]
        } else {
            vec![self.i * qn + self.j, self.i + self.j * qn]
        }
    }

    pub fn poly(&self, field: &Gf, qn: u64) -> Result<Poly, PolyError> {
        Poly::sum_of_monomials(field, &self.exponents(qn))
    }
}

/// Index pairs of `E_n`: first `F(i, j)` with `q^n > i > j >= 0`, then
/// `F(i, i)` with `1 <= i < q^n`.
pub fn en_pairs(qn: u64) -> Vec<FPair> {
    let mut out: Vec<FPair> = (1..qn)
        .flat_map(|i| (0..i).map(move |j| FPair::new(i, j)))
        .collect();
    out.extend((1..qn).map(|i| FPair::new(i, i)));
    out
}

pub fn en_set(field: &Gf, n: u32) -> Result<Vec<Poly>, ConstructionError> {
    let qn = level_order(field.q().into(), n)?;
    en_pairs(qn)
        .iter()
        .map(|p| Ok(p.poly(field, qn)?))
        .collect()
}

/// Exponents `i + q^n j` with `q^n > i > j >= 0`, increasing.
pub fn yn_exponents(qn: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..qn)
        .flat_map(|i| (0..i).map(move |j| i + qn * j))
        .collect();
    out.sort_unstable();
    out
}

pub fn yn_set(field: &Gf, n: u32) -> Result<Vec<Poly>, ConstructionError> {
    let qn = level_order(field.q().into(), n)?;
    yn_exponents(qn)
        .into_iter()
        .map(|e| Ok(Poly::sum_of_monomials(field, &[e])?))
        .collect()
}

/// Admissible `t` for the class-`r` slice of `Y_1`:
/// `0 <= t < r/2` or `r + 1 <= t < (q + r + 1)/2`.
pub fn b1r_indices(q: u64, r: u64) -> Result<Vec<u64>, ConstructionError> {
    if r < 1 || r + 1 > q {
        return Err(ConstructionError::BadClass { r, max: q - 1 });
    }
    let low = (0..).take_while(|t| 2 * t < r);
    let high = (r + 1..).take_while(|t| 2 * t < q + r + 1);
    Ok(low.chain(high).collect())
}

pub fn b1r_exponent(q: u64, r: u64, t: u64) -> u64 {
    r + t * (q - 1)
}

/// Monomials `x^(r + t(q-1))` spanning the class-`r` slice of `Y_1`.
pub fn b1r_set(field: &Gf, r: u64) -> Result<Vec<Poly>, ConstructionError> {
    let q = u64::from(field.q());
    b1r_indices(q, r)?
        .into_iter()
        .map(|t| Ok(Poly::sum_of_monomials(field, &[b1r_exponent(q, r, t)])?))
        .collect()
}

/// Outcome of [`f_reduce`]: `F(i, j) = scale * F(pair)` modulo `U_n`.
///
/// `scale` is 1 except when the rewriting lands on the two-term form
/// `x^(t q^n + t) + x^(t + t q^n)`, which equals `2 F(t, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduced {
    pub scale: u64,
    pub pair: FPair,
}

/// Rewrites `F(i, j)` with `i >= j` into a pair with `q^n > i' >= j'`,
/// following the induction on `i`: `F(i, i) -> F(t+1, t+1)`,
/// `F(i, j) -> F(t+1, r+1)` when both exceed `q^n`, and `F(i, j) -> F(t, j+1)`
/// otherwise, where `i = t + q^n`, `j = r + q^n`.
pub fn f_reduce(pair: FPair, qn: u64) -> Result<Reduced, ConstructionError> {
    let FPair { i, j } = pair;
    if i < j || i + j == 0 {
        return Err(ConstructionError::BadPair { i, j });
    }
    let mut scale = 1;
    let (mut i, mut j) = (i, j);
    loop {
        if i < qn {
            return Ok(Reduced {
                scale,
                pair: FPair::new(i, j),
            });
        }
        let t = i - qn;
        if i == j {
            (i, j) = (t + 1, t + 1);
        } else if j >= qn {
            (i, j) = (t + 1, j - qn + 1);
        } else if t > j + 1 {
            (i, j) = (t, j + 1);
        } else if t == j + 1 {
            // x^(t q^n + t) + x^(t + t q^n)
            scale *= 2;
            (i, j) = (t, t);
        } else if j + 1 < i {
            (i, j) = (j + 1, t);
        } else {
            // i = q^n, j = q^n - 1: F(0, q^n) = x^(q^n) + x^(q^(2n)) = F(1, 0)
            (i, j) = (1, 0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;
    use crate::quotient::QuotCtx;

    fn gf(p: u32) -> Gf {
        field_make(p, 1).unwrap()
    }

    fn mono(f: &Gf, exps: &[u64]) -> Poly {
        Poly::sum_of_monomials(f, exps).unwrap()
    }

    #[test]
    fn generators() {
        let f2 = gf(2);
        assert_eq!(wn_generators(&f2, 1).unwrap(), vec![mono(&f2, &[1, 2]), mono(&f2, &[3])]);
        assert_eq!(wn_generators(&f2, 2).unwrap(), vec![mono(&f2, &[1, 4]), mono(&f2, &[5])]);
        let f3 = gf(3);
        assert_eq!(wn_generators(&f3, 1).unwrap(), vec![mono(&f3, &[1, 3]), mono(&f3, &[4])]);
        assert!(matches!(wn_generators(&f2, 16), Err(ConstructionError::Overflow { .. })));
    }

    #[test]
    fn un_elements() {
        let f2 = gf(2);
        assert_eq!(un_basis(&f2, 1, 1).unwrap(), vec![mono(&f2, &[1, 4])]);
        let f3 = gf(3);
        let b = un_basis(&f3, 1, 2).unwrap();
        assert_eq!(b[0].coeff(9), Fe(1));
        assert_eq!(b[0].coeff(1), Fe(2));
        assert_eq!(b[1].coeff(10), Fe(1));
        assert_eq!(b[1].coeff(2), Fe(2));
        let ctx = QuotCtx::new(&f3, 1).unwrap();
        for u in un_basis(&f3, 1, 20).unwrap() {
            assert!(ctx.project(&u).unwrap().is_zero());
        }
        assert_eq!(un_basis(&f3, 1, 0).unwrap_err(), ConstructionError::EmptyCount);
    }

    #[test]
    fn e_and_y_sets() {
        let f2 = gf(2);
        assert_eq!(en_set(&f2, 1).unwrap(), vec![mono(&f2, &[1, 2]), mono(&f2, &[3])]);
        let f3 = gf(3);
        let e = en_set(&f3, 1).unwrap();
        let expect: Vec<Poly> = [&[1, 3][..], &[2, 6], &[5, 7], &[4], &[8]]
            .iter()
            .map(|x| mono(&f3, x))
            .collect();
        assert_eq!(e, expect);
        let f4 = field_make(2, 2).unwrap();
        assert_eq!(en_set(&f4, 1).unwrap().len(), 9);

        assert_eq!(yn_set(&f2, 1).unwrap(), vec![mono(&f2, &[1])]);
        assert_eq!(yn_exponents(3), vec![1, 2, 5]);
        assert_eq!(yn_set(&f4, 1).unwrap().len(), 6);
    }

    #[test]
    fn b_sets() {
        assert_eq!(b1r_indices(3, 1).unwrap(), vec![0, 2]);
        assert_eq!(b1r_indices(3, 2).unwrap(), vec![0]);
        assert_eq!(b1r_indices(5, 2).unwrap(), vec![0, 3]);
        let f5 = gf(5);
        assert_eq!(b1r_set(&f5, 2).unwrap(), vec![mono(&f5, &[2]), mono(&f5, &[14])]);
        assert!(matches!(b1r_indices(3, 3), Err(ConstructionError::BadClass { .. })));
        assert!(b1r_indices(3, 0).is_err());
    }

    #[test]
    fn b_sets_partition_y1() {
        for q in 2..=9u64 {
            let mut all: Vec<u64> = (1..q)
                .flat_map(|r| {
                    b1r_indices(q, r)
                        .unwrap()
                        .into_iter()
                        .map(move |t| b1r_exponent(q, r, t))
                })
                .collect();
            let n = all.len();
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len(), n, "classes overlap for q = {q}");
            assert_eq!(all, yn_exponents(q), "q = {q}");
        }
    }

    #[test]
    fn reduce_examples() {
        let r = |i, j| f_reduce(FPair::new(i, j), 2).unwrap();
        assert_eq!(r(2, 2), Reduced { scale: 1, pair: FPair::new(1, 1) });
        assert_eq!(r(2, 0), Reduced { scale: 1, pair: FPair::new(1, 0) });
        assert_eq!(r(2, 1), Reduced { scale: 1, pair: FPair::new(1, 0) });
        // F(3, 0) = x^6 + x^3 = 2 x^3 modulo U_1
        assert_eq!(r(3, 0), Reduced { scale: 2, pair: FPair::new(1, 1) });
        assert!(f_reduce(FPair::new(0, 0), 2).is_err());
        assert!(f_reduce(FPair::new(1, 2), 2).is_err());
    }

    #[test]
    fn degrees_are_distinct() {
        for (p, n) in [(2u32, 1u32), (3, 1), (2, 2), (5, 1)] {
            let f = gf(p);
            let mut degs: Vec<u64> = en_set(&f, n)
                .unwrap()
                .iter()
                .chain(un_basis(&f, n, 50).unwrap().iter())
                .map(|g| g.degree().unwrap())
                .collect();
            let len = degs.len();
            degs.sort_unstable();
            degs.dedup();
            assert_eq!(degs.len(), len);
        }
    }
}
