//! T-space and T-ideal closures inside `A_n`, with replayable certificates.
//!
//! The T-space generated by `H` is spanned by the images `g(s)` for
//! `g` in `H` and `s` ranging over all of `A_n`, so the exhaustive strategy
//! enumerates every substitution once. Images are computed in parallel in
//! fixed-size batches and inserted in enumeration order, which keeps bases
//! and certificates independent of the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{field_from_spec, Fe, FieldSpec, GfError};
use crate::poly::{Poly, PolyError, PolyRepr};
use crate::quotient::{coeffs_to_coords, coords_to_coeffs, top_exp, QuotCtx, QuotElt, QuotError};
use crate::subspace::{EchelonBasis, Insert};

/// Default cap on the number of substitutions an exhaustive run may visit.
pub const DEFAULT_EXHAUSTIVE_BOUND: u128 = 1 << 25;
/// Substitutions per parallel batch. Fixed so that results never depend on
/// the thread count.
const BATCH: usize = 512;
/// Environment variable selecting the worker count (0 = automatic).
pub const THREADS_ENV: &str = "TSPACE_LAB_THREADS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error(transparent)]
    Quot(#[from] QuotError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("search space too large: {candidates} substitutions exceed the bound {bound}")]
    TooLarge { candidates: String, bound: u128 },
    #[error("generator list is empty")]
    NoGenerators,
    #[error("witness {0} refers to generator {1}, but only {2} generators exist")]
    BadWitness(usize, usize, usize),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("generator {0} is not a q-polynomial")]
    NotAdditive(usize),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosureStrategy {
    Exhaustive,
    Randomized {
        seed: u64,
        /// Consecutive absorbed images before giving up; `None` means `64 D`.
        stall_threshold: Option<usize>,
    },
    DegreeCapped {
        max_terms: usize,
    },
}

impl ClosureStrategy {
    pub fn randomized(seed: u64) -> ClosureStrategy {
        ClosureStrategy::Randomized {
            seed,
            stall_threshold: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ClosureStrategy::Exhaustive)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosureStrategy::Exhaustive => "exhaustive",
            ClosureStrategy::Randomized { .. } => "random",
            ClosureStrategy::DegreeCapped { .. } => "degree-capped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    Full,
    Spans,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub gen: usize,
    pub sub: Vec<Vec<u32>>,
    /// Multiply the image by `x^mul` (T-ideal certificates only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mul: Option<u64>,
}

/// Portable proof that the images listed in `witnesses` span a subspace of
/// dimension `dim` (all of `A_n` when `claim` is `full`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub field: FieldSpec,
    pub n: u32,
    pub dim: usize,
    pub generators: Vec<PolyRepr>,
    pub witnesses: Vec<Witness>,
    pub claim: Claim,
}

/// Result of a closure computation.
#[derive(Debug, Clone)]
pub struct Closure {
    pub basis: EchelonBasis,
    pub certificate: Certificate,
    /// `true` when the basis is the exact closure (not a lower bound).
    pub exact: bool,
    /// Substitutions visited.
    pub visited: u128,
}

/// Worker configuration for closure searches.
#[derive(Debug, Clone)]
pub struct Engine {
    pub threads: usize,
    pub exhaustive_bound: u128,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            threads: 0,
            exhaustive_bound: DEFAULT_EXHAUSTIVE_BOUND,
        }
    }
}

impl Engine {
    /// Reads the worker count from `TSPACE_LAB_THREADS`.
    pub fn from_env() -> Engine {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0);
        Engine {
            threads,
            ..Engine::default()
        }
    }

    pub fn with_threads(threads: usize) -> Engine {
        Engine {
            threads,
            ..Engine::default()
        }
    }

    /// A single worker runs inline, so no threads are spawned.
    pub(crate) fn pool(&self) -> Result<Workers, ClosureError> {
        if self.threads == 1 {
            return Ok(Workers(None));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map(|p| Workers(Some(p)))
            .map_err(|e| ClosureError::Pool(e.to_string()))
    }

    fn check_exhaustive(&self, ctx: &QuotCtx) -> Result<u128, ClosureError> {
        match ctx.cardinality() {
            Some(c) if c <= self.exhaustive_bound => Ok(c),
            c => Err(ClosureError::TooLarge {
                candidates: c.map_or_else(
                    || format!("{}^{}", ctx.q(), ctx.dim()),
                    |c| c.to_string(),
                ),
                bound: self.exhaustive_bound,
            }),
        }
    }

    pub fn is_admissible(&self, ctx: &QuotCtx, strategy: &ClosureStrategy) -> bool {
        match strategy {
            ClosureStrategy::Exhaustive => self.check_exhaustive(ctx).is_ok(),
            ClosureStrategy::DegreeCapped { max_terms } => {
                sparse_count(ctx, *max_terms).is_some_and(|c| c <= self.exhaustive_bound)
            }
            ClosureStrategy::Randomized { .. } => true,
        }
    }

    /// Smallest T-space containing `gens`, taken modulo `U_n`.
    pub fn s_closure(
        &self,
        gens: &[Poly],
        ctx: &QuotCtx,
        strategy: &ClosureStrategy,
    ) -> Result<Closure, ClosureError> {
        let raw = project_all(gens, ctx)?;
        let pool = self.pool()?;
        let mut state = Search::new(ctx);
        let mut sink = |state: &mut Search, gen: usize, sub: &[Fe], img: &[Fe]| {
            if state.basis.insert_raw(img) == Insert::Added {
                state.witnesses.push(Witness {
                    gen,
                    sub: coeffs_to_coords(ctx.field(), sub),
                    mul: None,
                });
                true
            } else {
                false
            }
        };
        let mut rng = strategy_rng(strategy);
        let exact = self.run_pass(&pool, ctx, &raw, strategy, &mut state, rng.as_mut(), &mut sink)?;
        Ok(state.finish(gens, ctx, exact))
    }

    /// Exact closure of q-polynomials (every exponent a power of `q`).
    ///
    /// Such a `g` satisfies `g(a + b) = g(a) + g(b)` and `g(c a) = c g(a)`
    /// for `c` in the field, so `{g}^S` is spanned by the images of the
    /// monomials `x^1 .. x^D`.
    pub fn additive_s_closure(&self, gens: &[Poly], ctx: &QuotCtx) -> Result<Closure, ClosureError> {
        let raw = project_all(gens, ctx)?;
        let q = u64::from(ctx.q());
        for (i, g) in gens.iter().enumerate() {
            let mut ok = true;
            for (e, _) in g.terms() {
                let mut e = e;
                while e % q == 0 {
                    e /= q;
                }
                ok &= e == 1;
            }
            if !ok {
                return Err(ClosureError::NotAdditive(i));
            }
        }
        let top = raw.iter().map(|g| top_exp(g)).max().unwrap_or(0);
        let mut state = Search::new(ctx);
        for m in 1..=ctx.dim() as u64 {
            let sub = ctx.monomial(m)?;
            let powers = ctx.powers_raw(sub.coeffs(), top);
            for (gen, g) in raw.iter().enumerate() {
                let img = ctx.eval_with_powers(&g[..top_exp(g)], &powers);
                state.visited += 1;
                if state.basis.insert_raw(&img) == Insert::Added {
                    state.witnesses.push(Witness {
                        gen,
                        sub: coeffs_to_coords(ctx.field(), sub.coeffs()),
                        mul: None,
                    });
                }
            }
        }
        Ok(state.finish(gens, ctx, true))
    }

    /// Smallest T-ideal containing `gens`, taken modulo `U_n`: alternate
    /// substitution passes and multiplication passes until nothing new
    /// appears.
    pub fn t_closure(
        &self,
        gens: &[Poly],
        ctx: &QuotCtx,
        strategy: &ClosureStrategy,
    ) -> Result<Closure, ClosureError> {
        let raw = project_all(gens, ctx)?;
        let pool = self.pool()?;
        let mut basis = EchelonBasis::new(ctx);
        let mut rng = strategy_rng(strategy);
        let mut visited = 0u128;
        let mut exact = strategy.is_exact();

        // Vectors still owed a substitution pass.
        let mut pending: Vec<Vec<Fe>> = raw.clone();
        let mut seeded = false;
        while !pending.is_empty() && !basis.is_full() {
            let mut state = Search {
                basis,
                witnesses: Vec::new(),
                visited: 0,
            };
            let mut fresh: Vec<Vec<Fe>> = Vec::new();
            if !seeded {
                // the generators themselves (identity substitution) plus the
                // multiplication pass below covers their ideal
                for v in &pending {
                    if state.basis.insert_raw(v) == Insert::Added {
                        fresh.push(v.clone());
                    }
                }
                seeded = true;
            }
            let mut sink = |state: &mut Search, _gen: usize, _sub: &[Fe], img: &[Fe]| {
                if state.basis.insert_raw(img) == Insert::Added {
                    fresh.push(img.to_vec());
                    true
                } else {
                    false
                }
            };
            exact &= self.run_pass(&pool, ctx, &pending, strategy, &mut state, rng.as_mut(), &mut sink)?;
            visited += state.visited;
            basis = state.basis;

            // products of the new substitution images by every monomial
            let mut next = Vec::new();
            for v in &fresh {
                for k in 1..=ctx.dim() as u64 {
                    let prod = shift(ctx, v, k);
                    if basis.insert_raw(&prod) == Insert::Added {
                        next.push(prod);
                    }
                }
            }
            pending = next;
        }

        let mut cert_state = Search::new(ctx);
        let target = basis.dim();
        self.ideal_witnesses(&pool, ctx, &raw, strategy, target, &mut cert_state)?;
        let mut out = cert_state.finish(gens, ctx, exact);
        out.basis = basis;
        out.visited += visited;
        Ok(out)
    }

    /// Finds witnesses `(g, s, x^k)` whose images span a space of
    /// dimension `target`.
    fn ideal_witnesses(
        &self,
        pool: &Workers,
        ctx: &QuotCtx,
        raw: &[Vec<Fe>],
        strategy: &ClosureStrategy,
        target: usize,
        state: &mut Search,
    ) -> Result<(), ClosureError> {
        if target == 0 {
            return Ok(());
        }
        let mut sink = |state: &mut Search, gen: usize, sub: &[Fe], img: &[Fe]| {
            let mut added = false;
            for k in 0..=ctx.dim() as u64 {
                let v = if k == 0 { img.to_vec() } else { shift(ctx, img, k) };
                if state.basis.insert_raw(&v) == Insert::Added {
                    state.witnesses.push(Witness {
                        gen,
                        sub: coeffs_to_coords(ctx.field(), sub),
                        mul: (k > 0).then_some(k),
                    });
                    added = true;
                }
                if state.basis.dim() >= target {
                    break;
                }
            }
            added
        };
        let mut rng = strategy_rng(strategy);
        self.run_pass(pool, ctx, raw, strategy, state, rng.as_mut(), &mut Capped { target, sink: &mut sink })?;
        Ok(())
    }

    /// Visits substitutions per `strategy`, feeding every image to `sink` in
    /// enumeration order. Returns whether the visit was exhaustive.
    #[allow(clippy::too_many_arguments)]
    fn run_pass<S: Sink>(
        &self,
        pool: &Workers,
        ctx: &QuotCtx,
        gens: &[Vec<Fe>],
        strategy: &ClosureStrategy,
        state: &mut Search,
        rng: Option<&mut ChaCha8Rng>,
        sink: &mut S,
    ) -> Result<bool, ClosureError> {
        if gens.is_empty() {
            return Ok(true);
        }
        let top = gens.iter().map(|g| top_exp(g)).max().unwrap_or(0);
        let images = |subs: &[Vec<Fe>]| -> Vec<Vec<Vec<Fe>>> {
            pool.map(subs, |s| {
                let powers = ctx.powers_raw(s, top);
                gens.iter()
                    .map(|g| ctx.eval_with_powers(&g[..top_exp(g)], &powers))
                    .collect()
            })
        };
        match strategy {
            ClosureStrategy::Exhaustive => {
                let total = self.check_exhaustive(ctx)?;
                let mut idx = 0u128;
                while idx < total && !sink.done(state) {
                    let end = (idx + BATCH as u128).min(total);
                    let subs: Vec<Vec<Fe>> =
                        (idx..end).map(|i| ctx.element_at(i).into_coeffs()).collect();
                    let imgs = images(&subs);
                    for (s, per_gen) in subs.iter().zip(&imgs) {
                        state.visited += 1;
                        for (g, img) in per_gen.iter().enumerate() {
                            sink.accept(state, g, s, img);
                        }
                        if sink.done(state) {
                            break;
                        }
                    }
                    idx = end;
                }
                Ok(true)
            }
            ClosureStrategy::DegreeCapped { max_terms } => {
                match sparse_count(ctx, *max_terms) {
                    Some(c) if c <= self.exhaustive_bound => {}
                    c => {
                        return Err(ClosureError::TooLarge {
                            candidates: c.map_or("overflow".into(), |c| c.to_string()),
                            bound: self.exhaustive_bound,
                        })
                    }
                }
                let mut it = SparseSubs::new(ctx, *max_terms);
                while !sink.done(state) {
                    let subs: Vec<Vec<Fe>> = it.by_ref().take(BATCH).collect();
                    if subs.is_empty() {
                        break;
                    }
                    let imgs = images(&subs);
                    for (s, per_gen) in subs.iter().zip(&imgs) {
                        state.visited += 1;
                        for (g, img) in per_gen.iter().enumerate() {
                            sink.accept(state, g, s, img);
                        }
                        if sink.done(state) {
                            break;
                        }
                    }
                }
                Ok(false)
            }
            ClosureStrategy::Randomized {
                stall_threshold, ..
            } => {
                let stall = stall_threshold.unwrap_or(64 * ctx.dim()).max(1);
                let rng = rng.expect("randomized strategy carries an rng");
                let mut absorbed = 0usize;
                'outer: while !sink.done(state) {
                    let subs: Vec<Vec<Fe>> = (0..BATCH)
                        .map(|_| ctx.random(rng).into_coeffs())
                        .collect();
                    let imgs = images(&subs);
                    for (s, per_gen) in subs.iter().zip(&imgs) {
                        state.visited += 1;
                        for (g, img) in per_gen.iter().enumerate() {
                            if sink.accept(state, g, s, img) {
                                absorbed = 0;
                            } else {
                                absorbed += 1;
                            }
                            if absorbed >= stall || sink.done(state) {
                                break 'outer;
                            }
                        }
                    }
                }
                Ok(false)
            }
        }
    }
}

trait Sink {
    /// Handles one image; returns `true` if it enlarged the span.
    fn accept(&mut self, state: &mut Search, gen: usize, sub: &[Fe], img: &[Fe]) -> bool;
    fn done(&self, state: &Search) -> bool {
        state.basis.is_full()
    }
}

impl<F: FnMut(&mut Search, usize, &[Fe], &[Fe]) -> bool> Sink for F {
    fn accept(&mut self, state: &mut Search, gen: usize, sub: &[Fe], img: &[Fe]) -> bool {
        self(state, gen, sub, img)
    }
}

struct Capped<'a, F> {
    target: usize,
    sink: &'a mut F,
}

impl<F: FnMut(&mut Search, usize, &[Fe], &[Fe]) -> bool> Sink for Capped<'_, F> {
    fn accept(&mut self, state: &mut Search, gen: usize, sub: &[Fe], img: &[Fe]) -> bool {
        (self.sink)(state, gen, sub, img)
    }
    fn done(&self, state: &Search) -> bool {
        state.basis.dim() >= self.target
    }
}

/// Optional thread pool; `map` keeps input order either way.
pub(crate) struct Workers(Option<rayon::ThreadPool>);

impl Workers {
    pub(crate) fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match &self.0 {
            Some(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            None => items.iter().map(f).collect(),
        }
    }
}

struct Search {
    basis: EchelonBasis,
    witnesses: Vec<Witness>,
    visited: u128,
}

impl Search {
    fn new(ctx: &QuotCtx) -> Search {
        Search {
            basis: EchelonBasis::new(ctx),
            witnesses: Vec::new(),
            visited: 0,
        }
    }

    fn finish(self, gens: &[Poly], ctx: &QuotCtx, exact: bool) -> Closure {
        let dim = self.basis.dim();
        Closure {
            certificate: Certificate {
                field: ctx.field().spec().clone(),
                n: ctx.n(),
                dim,
                generators: gens.iter().map(Poly::to_repr).collect(),
                witnesses: self.witnesses,
                claim: if dim == ctx.dim() { Claim::Full } else { Claim::Spans },
            },
            basis: self.basis,
            exact,
            visited: self.visited,
        }
    }
}

fn strategy_rng(strategy: &ClosureStrategy) -> Option<ChaCha8Rng> {
    match strategy {
        ClosureStrategy::Randomized { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    }
}

fn project_all(gens: &[Poly], ctx: &QuotCtx) -> Result<Vec<Vec<Fe>>, ClosureError> {
    if gens.is_empty() {
        return Err(ClosureError::NoGenerators);
    }
    gens.iter()
        .map(|g| Ok(ctx.project(g)?.into_coeffs()))
        .collect()
}

/// `v * x^k` in `A_n`.
fn shift(ctx: &QuotCtx, v: &[Fe], k: u64) -> Vec<Fe> {
    let d = ctx.dim();
    let k = (k as usize) % d;
    let mut out = vec![Fe::ZERO; d];
    for (i, &c) in v.iter().enumerate() {
        out[(i + k) % d] = c;
    }
    out
}

/// Number of elements with at most `max_terms` nonzero coefficients.
fn sparse_count(ctx: &QuotCtx, max_terms: usize) -> Option<u128> {
    let d = ctx.dim() as u128;
    let q1 = u128::from(ctx.q()) - 1;
    let mut total = 0u128;
    let mut binom = 1u128;
    let mut qpow = 1u128;
    for k in 0..=max_terms.min(ctx.dim()) as u128 {
        if k > 0 {
            binom = binom.checked_mul(d - k + 1)?.checked_div(k)?;
            qpow = qpow.checked_mul(q1)?;
        }
        total = total.checked_add(binom.checked_mul(qpow)?)?;
    }
    Some(total)
}

/// Elements with at most `max_terms` nonzero coefficients: by support size,
/// then support in lexicographic order, then nonzero coefficients.
struct SparseSubs {
    dim: usize,
    q: u32,
    max_terms: usize,
    support: Vec<usize>,
    values: Vec<u32>,
    started: bool,
    exhausted: bool,
}

impl SparseSubs {
    fn new(ctx: &QuotCtx, max_terms: usize) -> SparseSubs {
        SparseSubs {
            dim: ctx.dim(),
            q: ctx.q(),
            max_terms: max_terms.min(ctx.dim()),
            support: Vec::new(),
            values: Vec::new(),
            started: false,
            exhausted: false,
        }
    }

    fn advance(&mut self) -> bool {
        // next coefficient tuple
        for v in self.values.iter_mut().rev() {
            if *v + 1 < self.q {
                *v += 1;
                return true;
            }
            *v = 1;
        }
        // next support of the same size
        let k = self.support.len();
        for i in (0..k).rev() {
            if self.support[i] < self.dim - (k - i) {
                self.support[i] += 1;
                for j in i + 1..k {
                    self.support[j] = self.support[j - 1] + 1;
                }
                return true;
            }
        }
        // next size
        if k < self.max_terms {
            self.support = (0..=k).collect();
            self.values = vec![1; k + 1];
            return true;
        }
        false
    }
}

impl Iterator for SparseSubs {
    type Item = Vec<Fe>;

    fn next(&mut self) -> Option<Vec<Fe>> {
        if self.exhausted {
            return None;
        }
        if self.started && !self.advance() {
            self.exhausted = true;
            return None;
        }
        self.started = true;
        let mut out = vec![Fe::ZERO; self.dim];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            out[i] = Fe(v);
        }
        Some(out)
    }
}

/// Closure of `gens` under all substitutions, using the worker count from
/// the environment.
pub fn s_closure(
    gens: &[Poly],
    ctx: &QuotCtx,
    strategy: &ClosureStrategy,
) -> Result<Closure, ClosureError> {
    Engine::from_env().s_closure(gens, ctx, strategy)
}

pub fn t_closure(
    gens: &[Poly],
    ctx: &QuotCtx,
    strategy: &ClosureStrategy,
) -> Result<Closure, ClosureError> {
    Engine::from_env().t_closure(gens, ctx, strategy)
}

/// Replays the witnesses of `cert` and checks the claimed dimension.
///
/// Malformed content (bad field, bad generator index, wrong substitution
/// length) is an error; a replay that falls short of the claim is `false`.
pub fn verify_certificate(cert: &Certificate) -> Result<bool, ClosureError> {
    let field = field_from_spec(&cert.field)?;
    let ctx = QuotCtx::new(&field, cert.n)?;
    let gens = cert
        .generators
        .iter()
        .map(|r| Poly::from_repr(&field, r))
        .collect::<Result<Vec<_>, _>>()?;
    let projected: Vec<QuotElt> = gens
        .iter()
        .map(|g| ctx.project(g))
        .collect::<Result<_, _>>()?;
    let mut basis = EchelonBasis::new(&ctx);
    for (i, w) in cert.witnesses.iter().enumerate() {
        let g = projected
            .get(w.gen)
            .ok_or(ClosureError::BadWitness(i, w.gen, projected.len()))?;
        let sub = ctx.from_coeffs(coords_to_coeffs(&field, &w.sub)?)?;
        let mut img = g.compose(&sub)?;
        if let Some(k) = w.mul {
            if k == 0 {
                return Err(ClosureError::Malformed(format!("witness {i}: mul must be positive")));
            }
            img = img.mul(&ctx.monomial(k)?)?;
        }
        basis.insert_mut(&img)?;
    }
    let claimed_ok = match cert.claim {
        Claim::Full => cert.dim == ctx.dim() && basis.is_full(),
        Claim::Spans => basis.dim() >= cert.dim,
    };
    Ok(claimed_ok)
}
