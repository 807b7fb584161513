//! Commutative two-variable computations in `k[x, y]_0`.
//!
//! Covers the expansion of `f(x + y)`, extraction of bihomogeneous
//! components, the rewriting `u v^q = -u^q v` modulo `W_1`, the collapse
//! `y -> x^(q^2 - 1)` into `A_1`, the elements `g` and `h` that drive the
//! maximality argument, and a spot check comparing one-variable and
//! two-variable closure membership.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::binom::{binom_mod_p, BinomError};
use crate::constructions::{b1r_indices, en_set, ConstructionError};
use crate::gf::{Fe, Gf, GfError};
use crate::poly::{Poly, PolyError};
use crate::quotient::{QuotCtx, QuotElt, QuotError};
use crate::subspace::{EchelonBasis, RowSpace};
use crate::tclosure::{ClosureError, ClosureStrategy, Engine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BivarError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Quot(#[from] QuotError),
    #[error(transparent)]
    Binom(#[from] BinomError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("collapse needs level n = 1, got n = {0}")]
    Level(u32),
    #[error("class r = {r} outside 1..={max}")]
    BadClass { r: u64, max: u64 },
    #[error("coefficient index t = {t} outside the admissible range for r = {r}")]
    BadIndex { r: u64, t: u64 },
    #[error("precondition violated: need r odd with 3 <= r <= q - 2, got r = {r}, q = {q}")]
    BadR { r: u64, q: u64 },
    #[error("bivariate search over {q}^{dim} substitutions exceeds the bound {bound}")]
    TooLarge { q: u32, dim: usize, bound: u128 },
    #[error("unsupported strategy for the bivariate search: {0}")]
    Strategy(&'static str),
}

/// A polynomial in commuting `x, y` without constant term.
#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    field: Gf,
    terms: BTreeMap<(u64, u64), Fe>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(a, b), &c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coords = self.field.coords(c);
            if self.field.spec().e == 1 {
                write!(f, "{}", coords[0])?;
            } else {
                write!(f, "{coords:?}")?;
            }
            match a {
                0 => {}
                1 => f.write_str("*x")?,
                _ => write!(f, "*x^{a}")?,
            }
            match b {
                0 => {}
                1 => f.write_str("*y")?,
                _ => write!(f, "*y^{b}")?,
            }
        }
        Ok(())
    }
}

impl BiPoly {
    pub fn zero(field: &Gf) -> BiPoly {
        BiPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        field: &Gf,
        terms: impl IntoIterator<Item = ((u64, u64), Fe)>,
    ) -> Result<BiPoly, PolyError> {
        let mut out = BiPoly::zero(field);
        for ((a, b), c) in terms {
            if a + b == 0 {
                return Err(PolyError::ZeroExponent);
            }
            if !field.is_valid(c) {
                return Err(PolyError::Field(GfError::BadElement(format!("{c:?}"))));
            }
            out.add_term(a, b, c);
        }
        Ok(out)
    }

    /// The univariate `f(x)` viewed in two variables.
    pub fn from_x(f: &Poly) -> BiPoly {
        let mut out = BiPoly::zero(f.field());
        for (e, c) in f.terms() {
            out.add_term(e, 0, c);
        }
        out
    }

    fn add_term(&mut self, a: u64, b: u64, c: Fe) {
        if c.is_zero() {
            return;
        }
        let f = &self.field;
        let entry = self.terms.entry((a, b)).or_insert(Fe::ZERO);
        *entry = f.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: u64, b: u64) -> Fe {
        self.terms.get(&(a, b)).copied().unwrap_or(Fe::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u64, u64), Fe)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &BiPoly) -> Result<BiPoly, PolyError> {
        self.field.check_same(&other.field)?;
        let mut out = self.clone();
        for ((a, b), c) in other.terms() {
            out.add_term(a, b, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&k, &c)| (k, self.field.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &BiPoly) -> Result<BiPoly, PolyError> {
        self.add(&other.neg())
    }

    /// Terms whose x-degree has label `rx` and y-degree has label `ry`.
    pub fn component(&self, rx: u64, ry: u64) -> BiPoly {
        let q = u64::from(self.field.q());
        let mut out = BiPoly::zero(&self.field);
        for (&(a, b), &c) in &self.terms {
            if degree_label(a, q) == rx && degree_label(b, q) == ry {
                out.terms.insert((a, b), c);
            }
        }
        out
    }

    /// All components keyed by label pair.
    pub fn components(&self) -> BTreeMap<(u64, u64), BiPoly> {
        let q = u64::from(self.field.q());
        let mut out: BTreeMap<(u64, u64), BiPoly> = BTreeMap::new();
        for (&(a, b), &c) in &self.terms {
            out.entry((degree_label(a, q), degree_label(b, q)))
                .or_insert_with(|| BiPoly::zero(&self.field))
                .terms
                .insert((a, b), c);
        }
        out
    }

    /// Replaces every `x^a y^(bq)` with `a >= 1` by `-x^(aq) y^b`.
    pub fn flip_q_powers(&self) -> BiPoly {
        let q = u64::from(self.field.q());
        let mut out = BiPoly::zero(&self.field);
        for (&(a, b), &c) in &self.terms {
            if a >= 1 && b >= q && b % q == 0 {
                out.add_term(a * q, b / q, self.field.neg(c));
            } else {
                out.add_term(a, b, c);
            }
        }
        out
    }
}

/// Class label of a degree: 0 for degree 0, otherwise the q-homogeneity
/// class in `1..=q-1`.
pub fn degree_label(d: u64, q: u64) -> u64 {
    if d == 0 {
        0
    } else {
        (d - 1) % (q - 1) + 1
    }
}

/// `f(x + y)` by binomial expansion.
pub fn bi_expand_sum(f: &Poly) -> Result<BiPoly, BivarError> {
    let field = f.field();
    let p = u64::from(field.spec().p);
    let mut out = BiPoly::zero(field);
    for (m, c) in f.terms() {
        for n in 0..=m {
            let b = binom_mod_p(m, n, p)?;
            if b != 0 {
                out.add_term(m - n, n, field.mul(c, field.from_int(b as i64)));
            }
        }
    }
    Ok(out)
}

pub fn bi_component(f: &BiPoly, rx: u64, ry: u64) -> BiPoly {
    f.component(rx, ry)
}

/// Substitutes `y -> x^(q^2 - 1)` and projects into `A_1`.
pub fn collapse_y(f: &BiPoly, ctx: &QuotCtx) -> Result<QuotElt, BivarError> {
    if ctx.n() != 1 {
        return Err(BivarError::Level(ctx.n()));
    }
    ctx.field().check_same(f.field())?;
    let d = ctx.dim() as u64;
    let mut coeffs = vec![Fe::ZERO; ctx.dim()];
    let field = ctx.field();
    for ((a, _), c) in f.terms() {
        // a + b d folds to a when a >= 1, and to d otherwise.
        let e = if a == 0 { d } else { (a - 1) % d + 1 };
        let slot = &mut coeffs[(e - 1) as usize];
        *slot = field.add(*slot, c);
    }
    Ok(ctx.from_coeffs(coeffs)?)
}

fn check_class(field: &Gf, r: u64) -> Result<u64, BivarError> {
    let q = u64::from(field.q());
    if r < 1 || r + 1 > q {
        return Err(BivarError::BadClass { r, max: q - 1 });
    }
    Ok(q)
}

/// `f = sum alpha_t x^(r + t(q-1))` over the admissible `t` for class `r`.
pub fn class_element(field: &Gf, r: u64, alphas: &BTreeMap<u64, Fe>) -> Result<Poly, BivarError> {
    let q = check_class(field, r)?;
    let allowed = b1r_indices(q, r)?;
    for &t in alphas.keys() {
        if !allowed.contains(&t) {
            return Err(BivarError::BadIndex { r, t });
        }
    }
    Ok(Poly::from_terms(
        field,
        alphas.iter().map(|(&t, &c)| (r + t * (q - 1), c)),
    )?)
}

/// The component of `x y^(q-1)` in `f(x+y) - f(x)` when `r = 1`, and of
/// `x^(r-1) y` in `f(x+y)` when `r >= 2`, by direct expansion.
pub fn g_of(field: &Gf, r: u64, alphas: &BTreeMap<u64, Fe>) -> Result<BiPoly, BivarError> {
    let q = check_class(field, r)?;
    let f = class_element(field, r, alphas)?;
    let expanded = bi_expand_sum(&f)?;
    if r == 1 {
        let diff = expanded.sub(&BiPoly::from_x(&f))?;
        Ok(diff.component(1, q - 1))
    } else {
        Ok(expanded.component(degree_label(r - 1, q), 1))
    }
}

/// The simplified form of `g` after applying the closed forms of the
/// binomial coefficients.
pub fn g_closed_form(field: &Gf, r: u64, alphas: &BTreeMap<u64, Fe>) -> Result<BiPoly, BivarError> {
    let q = check_class(field, r)?;
    class_element(field, r, alphas)?;
    let p = u64::from(field.spec().p);
    let k = |v: i64| field.from_int(v);
    let mut out = BiPoly::zero(field);
    let (ri, qm) = (r as i64, q - 1);
    for (&t, &alpha) in alphas {
        let ti = t as i64;
        let mut put = |a: u64, b: u64, c: Fe| out.add_term(a, b, field.mul(alpha, c));
        if r == 1 {
            if t >= 2 {
                put(1, t * qm, k(1 - ti));
                put(q, (t - 1) * qm, k(ti - 1));
            }
            continue;
        }
        if t == 0 {
            put(r - 1, 1, k(ri));
        } else if 2 * t < r {
            put(r - 1 + (t - 1) * qm, q, k(ti));
            put(r - 1 + t * qm, 1, k(ri - ti));
        } else {
            for j in 0..r {
                let c = binom_mod_p(t - 1, j, p)? * binom_mod_p(q + r - t, r - 1 - j, p)? % p;
                put(r - 1 + j * qm, 1 + (t - j) * qm, k(c as i64));
            }
            put(r - 1 + (t - 1) * qm, q, k(ti - 1));
            put(r - 1 + t * qm, 1, k(ri - ti));
        }
    }
    Ok(out)
}

pub fn check_g_formula(field: &Gf, r: u64, alphas: &BTreeMap<u64, Fe>) -> Result<bool, BivarError> {
    Ok(g_of(field, r, alphas)? == g_closed_form(field, r, alphas)?)
}

/// Random coefficients on the admissible indices of class `r`.
pub fn random_alphas<R: Rng + ?Sized>(
    field: &Gf,
    r: u64,
    rng: &mut R,
) -> Result<BTreeMap<u64, Fe>, BivarError> {
    let q = check_class(field, r)?;
    Ok(b1r_indices(q, r)?
        .into_iter()
        .map(|t| (t, Fe(rng.gen_range(0..field.q()))))
        .collect())
}

/// Result of the `h` computation for the binomial-coefficient `f`.
#[derive(Debug, Clone)]
pub struct HReport {
    pub f: Poly,
    pub g: BiPoly,
    pub flipped: BiPoly,
    pub h: QuotElt,
    pub closed_form: QuotElt,
    /// `(-1)^l C(r, l) (r-1)/2` with `l = (r-1)/2`, as stated alongside
    /// the closed form.
    pub beta: Fe,
    /// Coefficient of `(x^(q+1))^l` that the expansion actually produces:
    /// `(-1)^l C(r, l) (r - l)`.
    pub diagonal: Fe,
    pub in_en_span: bool,
}

impl HReport {
    /// `h` is nonzero, lies in the span of `E_1`, agrees with its closed
    /// form, and both diagonal coefficients are nonzero.
    pub fn holds(&self) -> bool {
        !self.h.is_zero()
            && self.in_en_span
            && self.h == self.closed_form
            && !self.beta.is_zero()
            && !self.diagonal.is_zero()
    }
}

fn signed_binom(field: &Gf, r: u64, t: u64) -> Result<Fe, BivarError> {
    let p = u64::from(field.spec().p);
    let c = field.from_int(binom_mod_p(r, t, p)? as i64);
    Ok(if t % 2 == 1 { field.neg(c) } else { c })
}

/// Runs the pipeline `f -> f(x+y) -> component of x^(r-1) y -> flip q-th
/// powers of y -> collapse y` for `f = sum_(t <= (r-1)/2) (-1)^t C(r,t)
/// x^(r + t(q-1))`.
pub fn h_of_binomial_f(ctx: &QuotCtx, r: u64) -> Result<HReport, BivarError> {
    let field = ctx.field();
    let q = u64::from(field.q());
    if ctx.n() != 1 {
        return Err(BivarError::Level(ctx.n()));
    }
    if r.is_multiple_of(2) || r < 3 || r + 2 > q {
        return Err(BivarError::BadR { r, q });
    }
    let half = (r - 1) / 2;
    let alphas: BTreeMap<u64, Fe> = (0..=half)
        .map(|t| Ok((t, signed_binom(field, r, t)?)))
        .collect::<Result<_, BivarError>>()?;
    let f = class_element(field, r, &alphas)?;
    let g = g_of(field, r, &alphas)?;
    let flipped = g.flip_q_powers();
    let h = collapse_y(&flipped, ctx)?;

    let k = |v: i64| field.from_int(v);
    let mut closed = Poly::zero(field);
    for t in 0..half {
        let c = field.mul(signed_binom(field, r, t)?, k((r - t) as i64));
        let pair = Poly::sum_of_monomials(field, &[q * (r - t - 1) + t, q * t + r - t - 1])?;
        closed = closed.add(&pair.scale(c))?;
    }
    let beta = field.mul(signed_binom(field, r, half)?, k(half as i64));
    let diagonal = field.mul(signed_binom(field, r, half)?, k((r - half) as i64));
    let diag = Poly::sum_of_monomials(field, &[(q + 1) * half])?;
    closed = closed.add(&diag.scale(diagonal))?;
    let closed_form = ctx.project(&closed)?;

    let en: Vec<QuotElt> = en_set(field, 1)?
        .iter()
        .map(|e| ctx.project(e))
        .collect::<Result<_, _>>()?;
    let span = EchelonBasis::span(ctx, &en)?;
    let in_en_span = span.contains(&h)?;
    Ok(HReport {
        f,
        g,
        flipped,
        h,
        closed_form,
        beta,
        diagonal,
        in_en_span,
    })
}

/// `k[x, y]_0` modulo `x^(q^2) = x` and `y^(q^2) = y`, as dense vectors
/// indexed by `(a, b)` with `0 <= a, b < q^2`, `(a, b) != (0, 0)`.
#[derive(Debug, Clone)]
pub struct BiQuot {
    field: Gf,
    side: u64,
}

impl BiQuot {
    pub fn new(field: &Gf) -> BiQuot {
        let q = u64::from(field.q());
        BiQuot {
            field: field.clone(),
            side: q * q,
        }
    }

    pub fn dim(&self) -> usize {
        (self.side * self.side - 1) as usize
    }

    fn fold(&self, e: u64) -> u64 {
        if e == 0 {
            0
        } else {
            (e - 1) % (self.side - 1) + 1
        }
    }

    fn index(&self, a: u64, b: u64) -> usize {
        (self.fold(a) * self.side + self.fold(b) - 1) as usize
    }

    fn exps(&self, i: usize) -> (u64, u64) {
        let k = i as u64 + 1;
        (k / self.side, k % self.side)
    }

    pub fn project(&self, f: &BiPoly) -> Vec<Fe> {
        let mut v = vec![Fe::ZERO; self.dim()];
        for ((a, b), c) in f.terms() {
            let i = self.index(a, b);
            v[i] = self.field.add(v[i], c);
        }
        v
    }

    pub fn mul(&self, u: &[Fe], v: &[Fe]) -> Vec<Fe> {
        let f = &self.field;
        let mut out = vec![Fe::ZERO; self.dim()];
        for (i, &a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (ia, ib) = self.exps(i);
            for (j, &b) in v.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (ja, jb) = self.exps(j);
                let k = self.index(ia + ja, ib + jb);
                out[k] = f.add(out[k], f.mul(a, b));
            }
        }
        out
    }

    /// `u(g)` for `u` given by its `A_1` coefficients.
    fn eval(&self, u: &[Fe], g: &[Fe]) -> Vec<Fe> {
        let f = &self.field;
        let mut out = vec![Fe::ZERO; self.dim()];
        let mut power = g.to_vec();
        for (k, &c) in u.iter().enumerate() {
            if k > 0 {
                power = self.mul(&power, g);
            }
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(&power) {
                *o = f.add(*o, f.mul(c, p));
            }
        }
        out
    }

    fn element_at(&self, mut idx: u128) -> Vec<Fe> {
        let q = u128::from(self.field.q());
        let mut v = vec![Fe::ZERO; self.dim()];
        for slot in v.iter_mut().rev() {
            *slot = Fe((idx % q) as u32);
            idx /= q;
        }
        v
    }
}

/// Membership of `f` in the closure of `gens`, computed in one variable and
/// in two variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpotCheck {
    pub univariate: bool,
    pub bivariate: bool,
    pub exact: bool,
}

impl SpotCheck {
    pub fn agree(&self) -> bool {
        self.univariate == self.bivariate
    }
}

const SPOT_BATCH: usize = 2048;

/// Compares `f in gens^S` inside `A_1` with the same question inside the
/// two-variable quotient, where every substitution `x -> g` ranges over
/// the whole quotient. Only the image of `x` matters since the generators
/// are univariate.
pub fn bivar_closure_spotcheck(
    engine: &Engine,
    gens: &[Poly],
    f: &Poly,
    strategy: &ClosureStrategy,
) -> Result<SpotCheck, BivarError> {
    let field = f.field().clone();
    let ctx = QuotCtx::new(&field, 1)?;
    let uni = engine.s_closure(gens, &ctx, strategy)?;
    let univariate = uni.basis.contains(&ctx.project(f)?)?;

    let bq = BiQuot::new(&field);
    let dim = bq.dim();
    let raw: Vec<Vec<Fe>> = gens
        .iter()
        .map(|g| Ok(ctx.project(g)?.into_coeffs()))
        .collect::<Result<_, BivarError>>()?;
    let target = bq.project(&BiPoly::from_x(f));
    let mut space = RowSpace::new(&field, dim);
    let pool = engine.pool()?;

    let exact = match strategy {
        ClosureStrategy::Exhaustive => {
            let total = u128::from(field.q())
                .checked_pow(dim as u32)
                .filter(|&c| c <= engine.exhaustive_bound)
                .ok_or(BivarError::TooLarge {
                    q: field.q(),
                    dim,
                    bound: engine.exhaustive_bound,
                })?;
            let mut start = 0u128;
            while start < total && !space.is_full() {
                let end = (start + SPOT_BATCH as u128).min(total);
                let idx: Vec<u128> = (start..end).collect();
                let images: Vec<Vec<Vec<Fe>>> = pool.map(&idx, |&i| {
                    let g = bq.element_at(i);
                    raw.iter().map(|u| bq.eval(u, &g)).collect()
                });
                for img in images.iter().flatten() {
                    space.insert(img);
                }
                start = end;
            }
            true
        }
        ClosureStrategy::Randomized {
            seed,
            stall_threshold,
        } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            let limit = stall_threshold.unwrap_or(64 * dim);
            let mut stall = 0usize;
            while stall < limit && !space.is_full() {
                let subs: Vec<Vec<Fe>> = (0..SPOT_BATCH)
                    .map(|_| (0..dim).map(|_| Fe(rng.gen_range(0..field.q()))).collect())
                    .collect();
                let images: Vec<Vec<Vec<Fe>>> =
                    pool.map(&subs, |g| raw.iter().map(|u| bq.eval(u, g)).collect());
                for img in images.iter().flatten() {
                    if space.insert(img) {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                    if stall >= limit {
                        break;
                    }
                }
            }
            false
        }
        ClosureStrategy::DegreeCapped { .. } => {
            return Err(BivarError::Strategy("degree-capped"));
        }
    };
    Ok(SpotCheck {
        univariate,
        bivariate: space.contains(&target),
        exact: exact && uni.exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;

    fn px(field: &Gf, exps: &[u64]) -> Poly {
        Poly::sum_of_monomials(field, exps).unwrap()
    }

    fn bi(field: &Gf, terms: &[((u64, u64), i64)]) -> BiPoly {
        BiPoly::from_terms(field, terms.iter().map(|&(k, c)| (k, field.from_int(c)))).unwrap()
    }

    #[test]
    fn expansion() {
        let f2 = field_make(2, 1).unwrap();
        let f3 = field_make(3, 1).unwrap();
        assert_eq!(bi_expand_sum(&px(&f2, &[1])).unwrap(), bi(&f2, &[((1, 0), 1), ((0, 1), 1)]));
        assert_eq!(bi_expand_sum(&px(&f2, &[2])).unwrap(), bi(&f2, &[((2, 0), 1), ((0, 2), 1)]));
        assert_eq!(
            bi_expand_sum(&px(&f3, &[3, 1])).unwrap(),
            bi(&f3, &[((3, 0), 1), ((0, 3), 1), ((1, 0), 1), ((0, 1), 1)])
        );
    }

    #[test]
    fn components() {
        let f2 = field_make(2, 1).unwrap();
        let f3 = field_make(3, 1).unwrap();
        let s = bi(&f2, &[((1, 0), 1), ((0, 1), 1)]);
        assert_eq!(s.component(1, 0), bi(&f2, &[((1, 0), 1)]));
        assert!(s.component(0, 0).is_zero());
        let t = bi(&f3, &[((3, 0), 1), ((0, 3), 1), ((1, 0), 1), ((0, 1), 1)]);
        assert_eq!(t.component(1, 0), bi(&f3, &[((3, 0), 1), ((1, 0), 1)]));
    }

    #[test]
    fn collapse() {
        let f2 = field_make(2, 1).unwrap();
        let f3 = field_make(3, 1).unwrap();
        let c2 = QuotCtx::new(&f2, 1).unwrap();
        let c3 = QuotCtx::new(&f3, 1).unwrap();
        assert_eq!(collapse_y(&bi(&f2, &[((0, 1), 1)]), &c2).unwrap(), c2.monomial(3).unwrap());
        assert_eq!(collapse_y(&bi(&f2, &[((1, 2), 1)]), &c2).unwrap(), c2.x());
        assert_eq!(collapse_y(&bi(&f3, &[((2, 4), 1)]), &c3).unwrap(), c3.monomial(2).unwrap());
        let c22 = QuotCtx::new(&f2, 2).unwrap();
        assert_eq!(collapse_y(&bi(&f2, &[((0, 1), 1)]), &c22).unwrap_err(), BivarError::Level(2));
    }

    #[test]
    fn g_examples() {
        let f3 = field_make(3, 1).unwrap();
        let a: BTreeMap<u64, Fe> = [(0, Fe::ONE)].into();
        assert_eq!(g_of(&f3, 2, &a).unwrap(), bi(&f3, &[((1, 1), 2)]));

        let f5 = field_make(5, 1).unwrap();
        let a: BTreeMap<u64, Fe> = [(2, Fe::ONE)].into();
        assert_eq!(g_of(&f5, 1, &a).unwrap(), bi(&f5, &[((1, 8), 4), ((5, 4), 1)]));
        assert!(check_g_formula(&f5, 1, &a).unwrap());

        let zero: BTreeMap<u64, Fe> = [(0, Fe::ZERO)].into();
        assert!(g_of(&f5, 3, &zero).unwrap().is_zero());
        let bad: BTreeMap<u64, Fe> = [(1, Fe::ONE)].into();
        assert_eq!(g_of(&f5, 1, &bad).unwrap_err(), BivarError::BadIndex { r: 1, t: 1 });
    }

    #[test]
    fn h_examples() {
        for (p, r) in [(5u32, 3u64), (7, 3), (7, 5)] {
            let ctx = QuotCtx::new(&field_make(p, 1).unwrap(), 1).unwrap();
            let rep = h_of_binomial_f(&ctx, r).unwrap();
            assert!(rep.holds(), "q={p} r={r}: h = {}, closed = {}, g = {}, span {}", rep.h.lift(), rep.closed_form.lift(), rep.g, rep.in_en_span);
        }
        let ctx = QuotCtx::new(&field_make(7, 1).unwrap(), 1).unwrap();
        assert_eq!(h_of_binomial_f(&ctx, 5).unwrap().beta, Fe(6));
        assert!(h_of_binomial_f(&ctx, 4).is_err());
        assert!(h_of_binomial_f(&ctx, 7).is_err());
    }

    #[test]
    fn spotcheck_examples() {
        let f2 = field_make(2, 1).unwrap();
        let e = Engine::with_threads(2);
        let s = ClosureStrategy::Exhaustive;
        let gen = [px(&f2, &[1, 2])];
        let r = bivar_closure_spotcheck(&e, &gen, &px(&f2, &[1, 2]), &s).unwrap();
        assert_eq!((r.univariate, r.bivariate), (true, true));
        let r = bivar_closure_spotcheck(&e, &gen, &px(&f2, &[1]), &s).unwrap();
        assert_eq!((r.univariate, r.bivariate), (false, false));
        let r = bivar_closure_spotcheck(&e, &[px(&f2, &[1])], &px(&f2, &[3]), &s).unwrap();
        assert_eq!((r.univariate, r.bivariate), (true, true));
        let f3 = field_make(3, 1).unwrap();
        assert!(matches!(
            bivar_closure_spotcheck(&e, &[px(&f3, &[1])], &px(&f3, &[2]), &s),
            Err(BivarError::TooLarge { .. })
        ));
    }
}
