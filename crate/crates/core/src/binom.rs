//! Binomial coefficients modulo a prime via base-p digits, and the closed
//! forms of `C(r + t(q-1), 1 + j(q-1))` and `C(r + t(q-1), r - 1 + j(q-1))`
//! used when expanding `f(x + y)` for homogeneous `f`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BinomError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Little-endian digits of an integer in a fixed base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitVector {
    pub base: u64,
    pub digits: Vec<u64>,
}

impl DigitVector {
    pub fn new(mut value: u64, base: u64) -> DigitVector {
        assert!(base >= 2, "base must be at least 2");
        let mut digits = Vec::new();
        while value > 0 {
            digits.push(value % base);
            value /= base;
        }
        DigitVector { base, digits }
    }

    pub fn value(&self) -> u64 {
        self.digits.iter().rev().fold(0, |acc, &d| acc * self.base + d)
    }

    pub fn digit(&self, k: usize) -> u64 {
        self.digits.get(k).copied().unwrap_or(0)
    }
}

/// Splits `q = p^e`.
pub fn prime_power(q: u64) -> Result<(u64, u32), BinomError> {
    if q < 2 {
        return Err(BinomError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let (mut rest, mut e) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest == 1 {
        Ok((p, e))
    } else {
        Err(BinomError::NotPrimePower(q))
    }
}

/// `C(m, n) mod p` for `m, n < p` by the multiplicative formula.
fn small_binom(m: u64, n: u64, p: u64) -> u64 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let (mut num, mut den) = (1u64, 1u64);
    for k in 0..n {
        num = num * ((m - k) % p) % p;
        den = den * ((k + 1) % p) % p;
    }
    num * mod_pow(den, p - 2, p) % p
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// `C(m, n) mod p` as the product of digitwise binomials.
pub fn binom_mod_p(m: u64, n: u64, p: u64) -> Result<u64, BinomError> {
    if p > u64::from(u32::MAX) || !is_prime(p as u32) {
        return Err(BinomError::NotPrime(p));
    }
    if n > m {
        return Ok(0);
    }
    let (dm, dn) = (DigitVector::new(m, p), DigitVector::new(n, p));
    let mut acc = 1u64;
    for k in 0..dm.digits.len() {
        acc = acc * small_binom(dm.digit(k), dn.digit(k), p) % p;
        if acc == 0 {
            break;
        }
    }
    Ok(acc)
}

/// `C(tq + r, jq + i) = C(t, j) C(r, i) mod p` for digits below `q`.
pub fn fines_app(t: u64, r: u64, j: u64, i: u64, q: u64) -> Result<u64, BinomError> {
    let (p, _) = prime_power(q)?;
    if [t, r, j, i].iter().any(|&v| v >= q) {
        return Err(BinomError::Precondition(format!(
            "t, r, j, i must be below q = {q}"
        )));
    }
    Ok(binom_mod_p(t, j, p)? * binom_mod_p(r, i, p)? % p)
}

/// The four parameter regimes of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::I, Case::II, Case::III, Case::IV];

    pub fn parse(s: &str) -> Option<Case> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Some(Case::I),
            "II" | "2" => Some(Case::II),
            "III" | "3" => Some(Case::III),
            "IV" | "4" => Some(Case::IV),
            _ => None,
        }
    }

    /// `(M, N)` of the binomial the case describes.
    pub fn binomial(self, r: u64, t: u64, j: u64, q: u64) -> (u64, u64) {
        let m = r + t * (q - 1);
        match self {
            Case::I | Case::II => (m, 1 + j * (q - 1)),
            Case::III | Case::IV => (m, r - 1 + j * (q - 1)),
        }
    }

    /// Whether `(r, t, j)` lies in the stated range for this case.
    pub fn admits(self, r: u64, t: u64, j: u64, q: u64) -> bool {
        if j > t || q < 2 {
            return false;
        }
        let upper = r < t && 2 * t < q + r + 1;
        match self {
            Case::I => (1..q).contains(&r) && 2 * t <= r,
            Case::II => (1..q).contains(&r) && upper,
            Case::III => (2..q).contains(&r) && 2 * t < r,
            Case::IV => (2..q).contains(&r) && upper,
        }
    }

    /// Every admissible `(r, t, j)` for this case, in increasing order.
    pub fn domain(self, q: u64) -> Vec<(u64, u64, u64)> {
        let mut out = Vec::new();
        for r in 1..q {
            for t in 0..q + r {
                for j in 0..=t {
                    if self.admits(r, t, j, q) {
                        out.push((r, t, j));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        };
        f.write_str(s)
    }
}

fn residue(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// Evaluates the piecewise closed form for `case` at `(r, t, j)`.
pub fn special_case(case: Case, r: u64, t: u64, j: u64, q: u64) -> Result<u64, BinomError> {
    let (p, _) = prime_power(q)?;
    if !case.admits(r, t, j, q) {
        return Err(BinomError::Precondition(format!(
            "case {case} does not admit r = {r}, t = {t}, j = {j}, q = {q}"
        )));
    }
    let (ri, ti) = (r as i64, t as i64);
    let v = match case {
        Case::I => match j {
            0 => residue(ri - ti, p),
            1 => residue(ti, p),
            _ => 0,
        },
        Case::II => match j {
            0 => residue(ri - ti, p),
            1 => residue(ti - 1, p),
            _ => binom_mod_p(t - 1, j - 1, p)? * binom_mod_p(q + r - t, q + 1 - j, p)? % p,
        },
        Case::III => {
            if j + 1 < t {
                0
            } else if j + 1 == t {
                residue(ti, p)
            } else {
                residue(ri - ti, p)
            }
        }
        Case::IV => {
            if j < r {
                binom_mod_p(t - 1, j, p)? * binom_mod_p(q + r - t, r - 1 - j, p)? % p
            } else if j + 1 < t {
                0
            } else if j + 1 == t {
                residue(ti - 1, p)
            } else {
                residue(ri - ti, p)
            }
        }
    };
    Ok(v)
}

/// One line of the case table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub r: u64,
    pub t: u64,
    pub j: u64,
    pub formula: u64,
    pub oracle: u64,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.formula == self.oracle
    }
}

/// Closed form against the digit-product evaluation over the whole domain.
pub fn case_table(case: Case, q: u64) -> Result<Vec<TableRow>, BinomError> {
    let (p, _) = prime_power(q)?;
    case.domain(q)
        .into_iter()
        .map(|(r, t, j)| {
            let (m, n) = case.binomial(r, t, j, q);
            Ok(TableRow {
                r,
                t,
                j,
                formula: special_case(case, r, t, j, q)?,
                oracle: binom_mod_p(m, n, p)?,
            })
        })
        .collect()
}
