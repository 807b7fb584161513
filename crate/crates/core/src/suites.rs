//! Verification suites. Each suite runs a fixed list of checks and records
//! one [`Check`](crate::report::Check) per claim.
//!
//! Non-membership is only ever concluded from an exhaustive closure. A
//! randomized closure is a lower bound, so a randomized search that stalls
//! is reported as inconclusive, never as a failure.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::binom::{binom_mod_p, case_table, fines_app, prime_power, BinomError, Case};
use crate::bivar::{
    bivar_closure_spotcheck, check_g_formula, h_of_binomial_f, random_alphas, BivarError,
};
use crate::constructions::{
    b1r_set, en_set, un_basis, wn_generators, yn_set, ConstructionError,
};
use crate::gf::{field_make, Fe, Gf, GfError};
use crate::poly::{Poly, PolyError};
use crate::quotient::{QuotCtx, QuotElt, QuotError};
use crate::report::{Params, Status, SuiteReport};
use crate::subspace::EchelonBasis;
use crate::tclosure::{
    verify_certificate, Certificate, Closure, ClosureError, ClosureStrategy, Engine,
};

#[derive(Debug, Error)]
pub enum SuiteError {
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
    #[error(transparent)]
    Bivar(#[from] BivarError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

type Result<T> = std::result::Result<T, SuiteError>;

pub const SUITES: [&str; 8] = [
    "bases",
    "wn-props",
    "containment",
    "sum",
    "maximality",
    "summary",
    "binom",
    "identities",
];

/// Every anchor a suite check may carry.
pub const ANCHORS: [&str; 20] = [
    "un basis",
    "fundamental set",
    "wn/un basis",
    "codimension",
    "complement",
    "fundamental wn",
    "un in wn",
    "subalgebra",
    "basic for containment (i)",
    "basic for containment (ii)",
    "containment",
    "sum",
    "maximality of w1",
    "maximality exploration",
    "summary",
    "fines application",
    "special fines result",
    "base case",
    "main inductive step",
    "commutative in kxy",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    Exhaustive,
    Random,
}

impl Search {
    pub fn name(self) -> &'static str {
        match self {
            Search::Exhaustive => "exhaustive",
            Search::Random => "random",
        }
    }
}

/// Options shared by all suites.
#[derive(Debug, Clone)]
pub struct Options {
    pub search: Search,
    pub seed: u64,
    pub stall: Option<usize>,
    pub trials: usize,
    pub timings: bool,
    pub engine: Engine,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            search: Search::Exhaustive,
            seed: 42,
            stall: None,
            trials: 1000,
            timings: false,
            engine: Engine::from_env(),
        }
    }
}

impl Options {
    fn random_with(&self, salt: u64) -> ClosureStrategy {
        ClosureStrategy::Randomized {
            seed: self.seed.wrapping_add(salt),
            stall_threshold: self.stall,
        }
    }

    /// The requested strategy, or a randomized one when `fallback` is set
    /// and exhaustive search is out of reach.
    fn strategy_for(&self, ctx: &QuotCtx, salt: u64, fallback: bool) -> Option<ClosureStrategy> {
        match self.search {
            Search::Random => Some(self.random_with(salt)),
            Search::Exhaustive => {
                if self.engine.is_admissible(ctx, &ClosureStrategy::Exhaustive) {
                    Some(ClosureStrategy::Exhaustive)
                } else if fallback {
                    Some(self.random_with(salt))
                } else {
                    None
                }
            }
        }
    }

    /// Exhaustive when requested and feasible, randomized otherwise.
    fn search_strategy(&self, ctx: &QuotCtx, salt: u64) -> ClosureStrategy {
        self.strategy_for(ctx, salt, true)
            .unwrap_or_else(|| self.random_with(salt))
    }

    fn params(&self, q: u32) -> Params {
        Params {
            q: Some(q),
            strategy: Some(self.search.name().to_string()),
            seed: (self.search == Search::Random).then_some(self.seed),
            ..Params::default()
        }
    }
}

/// `GF(q)` for a prime power `q`.
pub fn field_for_q(q: u32) -> Result<Gf> {
    let (p, e) = prime_power(u64::from(q))?;
    Ok(field_make(p as u32, e)?)
}

fn choose2(m: u64) -> u64 {
    m * (m.saturating_sub(1)) / 2
}

fn elt_json(v: &QuotElt) -> Value {
    serde_json::to_value(v.lift().to_repr()).expect("poly serializes")
}

fn poly_json(p: &Poly) -> Value {
    serde_json::to_value(p.to_repr()).expect("poly serializes")
}

fn span_of(ctx: &QuotCtx, ps: &[Poly]) -> Result<EchelonBasis> {
    let elts: Vec<QuotElt> = ps.iter().map(|p| ctx.project(p)).collect::<std::result::Result<_, _>>()?;
    Ok(EchelonBasis::span(ctx, &elts)?)
}

fn skip_reason(ctx: &QuotCtx) -> Value {
    json!({
        "reason": format!(
            "exhaustive search over {}^{} substitutions is out of reach",
            ctx.q(),
            ctx.dim()
        )
    })
}

/// `nf_exp(q^k + add)` in `A_n` without forming `q^k`.
fn nf_of_power(ctx: &QuotCtx, k: u64, add: u64) -> u64 {
    let d = ctx.dim() as u128;
    let mut acc: u128 = 1 % d;
    let mut base = u128::from(ctx.q()) % d;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % d;
        }
        base = base * base % d;
        e >>= 1;
    }
    // (q^k + add - 1) mod d, then shift to 1..=d
    ((acc + u128::from(add) + d - 1) % d + 1) as u64
}

/// Outcome of a fullness search, as a status and detail.
fn fullness(closure: &Closure, ctx: &QuotCtx) -> Result<(Status, Value)> {
    let dim = closure.basis.dim();
    if closure.basis.is_full() {
        let replayed = verify_certificate(&closure.certificate)?;
        let status = if replayed { Status::Pass } else { Status::Fail };
        Ok((
            status,
            json!({"dim": dim, "witnesses": closure.certificate.witnesses.len(), "replayed": replayed}),
        ))
    } else if closure.exact {
        Ok((Status::Fail, json!({"dim": dim, "expected": ctx.dim()})))
    } else {
        Ok((
            Status::Inconclusive,
            json!({"dim": dim, "expected": ctx.dim(), "reason": "randomized search stalled"}),
        ))
    }
}

/// Explicit bases of `U_n`, `W_n` and the complement spanned by `Y_n`.
pub fn suite_bases(q: u32, n: u32, opts: &Options) -> Result<SuiteReport> {
    let field = field_for_q(q)?;
    let ctx = QuotCtx::new(&field, n)?;
    let qn = ctx.qn();
    let d = ctx.dim();
    let mut rep = SuiteReport::new(
        "bases",
        Params {
            n: Some(n),
            ..opts.params(q)
        },
        Some(field.spec().clone()),
    )
    .with_timings(opts.timings);

    let count = d.min(64);
    let un = un_basis(&field, n, count)?;
    rep.run("U_n basis elements vanish in A_n", "un basis", || {
        match un.iter().position(|u| !ctx.project(u).is_ok_and(|v| v.is_zero())) {
            None => (Status::Pass, json!({"checked": count})),
            Some(i) => (Status::Fail, json!({"index": i, "element": poly_json(&un[i])})),
        }
    });

    let en = en_set(&field, n)?;
    let en_span = span_of(&ctx, &en)?;
    let expected = choose2(qn) + qn - 1;
    rep.run("E_n projects to an independent set of size C(q^n,2)+q^n-1", "fundamental set", || {
        let ok = en.len() as u64 == expected && en_span.dim() == en.len();
        let status = if ok { Status::Pass } else { Status::Fail };
        (status, json!({"size": en.len(), "rank": en_span.dim(), "expected": expected}))
    });

    match opts.strategy_for(&ctx, 0, false) {
        None => {
            rep.push("closure of W_n generators equals span(E_n)", "wn/un basis", Status::Skipped, skip_reason(&ctx));
            rep.push("codimension of W_n is C(q^n,2)", "codimension", Status::Skipped, skip_reason(&ctx));
        }
        Some(strategy) => {
            let closure = opts.engine.s_closure(&wn_generators(&field, n)?, &ctx, &strategy)?;
            let inside = closure.basis.is_subspace_of(&en_span)?;
            let equal = closure.basis == en_span;
            rep.run("closure of W_n generators equals span(E_n)", "wn/un basis", || {
                let detail = json!({"closure_dim": closure.basis.dim(), "span_dim": en_span.dim(), "exact": closure.exact});
                let status = match (inside, equal, closure.exact) {
                    (false, _, _) => Status::Fail,
                    (true, true, true) => Status::Pass,
                    (true, false, true) => Status::Fail,
                    (true, _, false) => Status::Inconclusive,
                };
                (status, detail)
            });
            rep.run("codimension of W_n is C(q^n,2)", "codimension", || {
                let codim = (d - closure.basis.dim()) as u64;
                let detail = json!({"D": d, "codim": codim, "expected": choose2(qn)});
                let status = if !closure.exact {
                    Status::Inconclusive
                } else if codim == choose2(qn) {
                    Status::Pass
                } else {
                    Status::Fail
                };
                (status, detail)
            });
        }
    }

    let yn_span = span_of(&ctx, &yn_set(&field, n)?)?;
    rep.run("span(Y_n) is a complement of span(E_n)", "complement", || {
        let sum = en_span.sum(&yn_span).expect("same context");
        let ok = sum.is_full() && en_span.dim() + yn_span.dim() == d;
        let status = if ok { Status::Pass } else { Status::Fail };
        (status, json!({"en_dim": en_span.dim(), "yn_dim": yn_span.dim(), "D": d}))
    });
    Ok(rep)
}

/// Membership identities of `W_n`, using `span(E_n)` as the oracle.
pub fn suite_wn_props(q: u32, n: u32, opts: &Options) -> Result<SuiteReport> {
    let field = field_for_q(q)?;
    let ctx = QuotCtx::new(&field, n)?;
    let qn = ctx.qn();
    let q2n = qn * qn;
    let trials = opts.trials;
    let mut rep = SuiteReport::new(
        "wn-props",
        Params {
            q: Some(q),
            n: Some(n),
            seed: Some(opts.seed),
            trials: Some(trials),
            ..Params::default()
        },
        Some(field.spec().clone()),
    )
    .with_timings(opts.timings);
    let w = span_of(&ctx, &en_set(&field, n)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    type Trial<'a> = Box<dyn Fn(&QuotElt, &QuotElt) -> std::result::Result<QuotElt, QuotError> + 'a>;
    let random_member = |rng: &mut ChaCha8Rng| -> QuotElt {
        let mut acc = ctx.zero();
        for row in w.elements() {
            let c = ctx.random(rng).coeffs()[0];
            acc = acc.add(&row.scale(c)).expect("same context");
        }
        acc
    };
    let checks: Vec<(&str, &str, bool, Trial)> = vec![
        (
            "u v^(q^n) + u^(q^n) v lies in W_n",
            "fundamental wn",
            false,
            Box::new(|u, v| u.mul(&v.pow(qn)?)?.add(&u.pow(qn)?.mul(v)?)),
        ),
        (
            "(u - u^(q^(2n))) v lies in W_n",
            "un in wn",
            false,
            Box::new(|u, v| u.sub(&u.pow(q2n)?)?.mul(v)),
        ),
        (
            "products of elements of W_n lie in W_n",
            "subalgebra",
            true,
            Box::new(|a, b| a.mul(b)),
        ),
        (
            "(u + u^(q^n)) v^(q^n + 1) lies in W_n",
            "subalgebra",
            false,
            Box::new(|u, v| u.add(&u.pow(qn)?)?.mul(&v.pow(qn + 1)?)),
        ),
    ];
    for (claim, anchor, members, f) in checks {
        let mut outcome = (Status::Pass, json!({"trials": trials}));
        for t in 0..trials {
            let (u, v) = if members {
                (random_member(&mut rng), random_member(&mut rng))
            } else {
                (ctx.random(&mut rng), ctx.random(&mut rng))
            };
            let img = f(&u, &v)?;
            if !w.contains(&img)? {
                outcome = (
                    Status::Fail,
                    json!({"trial": t, "u": elt_json(&u), "v": elt_json(&v), "image": elt_json(&img)}),
                );
                break;
            }
        }
        rep.push(claim, anchor, outcome.0, outcome.1);
    }
    Ok(rep)
}

/// `W_{2^r m}` inside `W_{2^r}` for odd `m`.
pub fn suite_containment(q: u32, r: u32, m: u64, opts: &Options) -> Result<SuiteReport> {
    if m.is_multiple_of(2) {
        return Err(SuiteError::Precondition(format!("m must be odd, got {m}")));
    }
    if r > 4 {
        return Err(SuiteError::Precondition(format!("r = {r} is too large")));
    }
    let field = field_for_q(q)?;
    let level = 1u32 << r;
    let ctx = QuotCtx::new(&field, level)?;
    let mut rep = SuiteReport::new(
        "containment",
        Params {
            r: Some(u64::from(r)),
            m: Some(m),
            ..opts.params(q)
        },
        Some(field.spec().clone()),
    )
    .with_timings(opts.timings);
    let big = u64::from(level) * m;
    let top = nf_of_power(&ctx, big, 0);

    if m >= 3 {
        let lower = nf_of_power(&ctx, u64::from(level) * (m - 2), 0);
        rep.run("x^(q^(2^r m)) = x^(q^(2^r (m-2))) modulo U_(2^r)", "basic for containment (i)", || {
            let status = if top == lower { Status::Pass } else { Status::Fail };
            (status, json!({"D": ctx.dim(), "nf_high": top, "nf_low": lower}))
        });
    }

    let Some(strategy) = opts.strategy_for(&ctx, 0, false) else {
        rep.push("x + (-1)^(m+1) x^(q^(2^r m)) lies in {x + x^(q^(2^r))}^S", "basic for containment (ii)", Status::Skipped, skip_reason(&ctx));
        rep.push("generators of W_(2^r m) lie in W_(2^r)", "containment", Status::Skipped, skip_reason(&ctx));
        return Ok(rep);
    };
    let qn = ctx.qn();
    let x_plus = Poly::sum_of_monomials(&field, &[1, qn])?;
    let part = opts.engine.s_closure(&[x_plus], &ctx, &strategy)?;
    let sign = if m % 2 == 1 { Fe::ONE } else { field.neg(Fe::ONE) };
    let target = ctx.x().add(&ctx.monomial(top)?.scale(sign))?;
    rep.run("x + (-1)^(m+1) x^(q^(2^r m)) lies in {x + x^(q^(2^r))}^S", "basic for containment (ii)", || {
        membership_status(&part, &target)
    });

    let whole = opts.engine.s_closure(&wn_generators(&field, level)?, &ctx, &strategy)?;
    let g1 = ctx.x().add(&ctx.monomial(top)?)?;
    let g2 = ctx.monomial(nf_of_power(&ctx, big, 1))?;
    rep.run("generators of W_(2^r m) lie in W_(2^r)", "containment", || {
        let (s1, d1) = membership_status(&whole, &g1);
        let (s2, d2) = membership_status(&whole, &g2);
        let status = if s1 == Status::Pass && s2 == Status::Pass {
            Status::Pass
        } else if s1 == Status::Fail || s2 == Status::Fail {
            Status::Fail
        } else {
            Status::Inconclusive
        };
        (status, json!({"sum_generator": d1, "product_generator": d2}))
    });
    Ok(rep)
}

/// Positive membership is conclusive from any closure; absence only from
/// an exact one.
fn membership_status(closure: &Closure, v: &QuotElt) -> (Status, Value) {
    let member = closure.basis.contains(v).unwrap_or(false);
    let detail = json!({"element": elt_json(v), "member": member, "closure_dim": closure.basis.dim()});
    let status = match (member, closure.exact) {
        (true, _) => Status::Pass,
        (false, true) => Status::Fail,
        (false, false) => Status::Inconclusive,
    };
    (status, detail)
}

/// `W_(2^r) + W_(2^s)` is everything, checked in `A_(2^s)`.
pub fn suite_sum(q: u32, r: u32, s: u32, opts: &Options) -> Result<SuiteReport> {
    if s <= r {
        return Err(SuiteError::Precondition(format!("need s > r, got r = {r}, s = {s}")));
    }
    if s > 4 {
        return Err(SuiteError::Precondition(format!("s = {s} is too large")));
    }
    let field = field_for_q(q)?;
    let ctx = QuotCtx::new(&field, 1 << s)?;
    let mut rep = SuiteReport::new(
        "sum",
        Params {
            r: Some(u64::from(r)),
            s: Some(u64::from(s)),
            seed: Some(opts.seed),
            ..opts.params(q)
        },
        Some(field.spec().clone()),
    )
    .with_timings(opts.timings);
    let mut gens = wn_generators(&field, 1 << r)?;
    gens.extend(wn_generators(&field, 1 << s)?);
    let strategy = opts.search_strategy(&ctx, 0);
    let closure = opts.engine.s_closure(&gens, &ctx, &strategy)?;
    let (status, mut detail) = fullness(&closure, &ctx)?;
    detail["search"] = json!(strategy.name());
    rep.push("W_(2^r) + W_(2^s) is all of A_(2^s)", "sum", status, detail);
    if closure.basis.is_full() {
        rep.certificates.push((format!("q{q}-r{r}-s{s}"), closure.certificate));
    }
    Ok(rep)
}

/// All nonzero combinations of `basis`, in lexicographic coefficient order.
fn nonzero_combinations(field: &Gf, basis: &[Poly]) -> Result<Vec<Poly>> {
    let q = u64::from(field.q());
    let k = basis.len() as u32;
    let total = q.pow(k);
    let mut out = Vec::with_capacity(total as usize - 1);
    for idx in 1..total {
        let mut acc = Poly::zero(field);
        let mut rest = idx;
        for b in basis.iter().rev() {
            let c = Fe((rest % q) as u32);
            rest /= q;
            if !c.is_zero() {
                acc = acc.add(&b.scale(c))?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

struct Sweep {
    status: Status,
    detail: Value,
    certificates: Vec<(String, Certificate)>,
}

/// Closure of `gens + {f}` for every `f` in `fs`.
fn fullness_sweep(
    opts: &Options,
    ctx: &QuotCtx,
    gens: &[Poly],
    fs: &[Poly],
    tag: &str,
    salt: u64,
) -> Result<Sweep> {
    let mut certificates = Vec::new();
    let mut worst = Status::Pass;
    let mut witness: Option<Value> = None;
    for (i, f) in fs.iter().enumerate() {
        let strategy = opts.search_strategy(ctx, salt + i as u64);
        let mut all = gens.to_vec();
        all.push(f.clone());
        let closure = opts.engine.s_closure(&all, ctx, &strategy)?;
        let (status, detail) = fullness(&closure, ctx)?;
        if closure.basis.is_full() {
            certificates.push((format!("{tag}-f{i}"), closure.certificate));
        }
        let rank = |s: Status| match s {
            Status::Fail => 3,
            Status::Inconclusive => 2,
            _ => 0,
        };
        if rank(status) > rank(worst) {
            worst = status;
            witness = Some(json!({"f": poly_json(f), "closure": detail}));
        }
    }
    let mut detail = json!({"elements": fs.len(), "D": ctx.dim()});
    if let Some(w) = witness {
        detail["counterexample"] = w;
    }
    Ok(Sweep {
        status: worst,
        detail,
        certificates,
    })
}

/// Maximality of `W_1`: adding any nonzero element of the complement
/// generates everything. Levels `n > 1` run the same sweep over the
/// monomials of `Y_n` and are recorded as exploratory.
pub fn suite_maximality(q: u32, n: u32, opts: &Options) -> Result<SuiteReport> {
    let field = field_for_q(q)?;
    let ctx = QuotCtx::new(&field, n)?;
    let mut rep = SuiteReport::new(
        "maximality",
        Params {
            n: Some(n),
            seed: Some(opts.seed),
            ..opts.params(q)
        },
        Some(field.spec().clone()),
    )
    .with_timings(opts.timings);
    let gens = wn_generators(&field, n)?;

    if n != 1 {
        for (i, f) in yn_set(&field, n)?.iter().enumerate() {
            let sweep = fullness_sweep(opts, &ctx, &gens, std::slice::from_ref(f), &format!("q{q}-n{n}-y{i}"), 1000 * i as u64)?;
            let mut detail = sweep.detail;
            detail["full"] = json!(sweep.status == Status::Pass);
            detail["f"] = poly_json(f);
            rep.push("W_n + {f}^S for a monomial f of Y_n", "maximality exploration", Status::Exploratory, detail);
        }
        return Ok(rep);
    }

    for r in 1..u64::from(q) {
        let fs = nonzero_combinations(&field, &b1r_set(&field, r)?)?;
        let sweep = fullness_sweep(opts, &ctx, &gens, &fs, &format!("q{q}-r{r}"), 1000 * r)?;
        let mut detail = sweep.detail;
        detail["class"] = json!(r);
        rep.push(
            "W_1 + {f}^S = A_1 for every nonzero f spanned by the class-r slice of Y_1",
            "maximality of w1",
            sweep.status,
            detail,
        );
        rep.certificates.extend(sweep.certificates);
    }

    if q <= 3 {
        let fs = nonzero_combinations(&field, &yn_set(&field, 1)?)?;
        let sweep = fullness_sweep(opts, &ctx, &gens, &fs, &format!("q{q}-y"), 999_999)?;
        rep.push(
            "W_1 + {f}^S = A_1 for every nonzero f in span(Y_1)",
            "maximality of w1",
            sweep.status,
            sweep.detail,
        );
    }
    Ok(rep)
}

/// Non-membership statements, decided by exact closures only.
///
/// An element outside the image of a closure in `A_n` is outside the
/// closure itself. The converse needs `U_n` inside the closure, which holds
/// for `W_2` but not for `{x + x^q}^S`; there a quotient-level membership
/// moves the check to the next level instead of failing it.
pub fn suite_summary(q: u32, opts: &Options) -> Result<SuiteReport> {
    let field = field_for_q(q)?;
    let mut rep = SuiteReport::new("summary", opts.params(q), Some(field.spec().clone()))
        .with_timings(opts.timings);
    let qq = u64::from(q);

    let decide = |ctx: &QuotCtx, gens: &[Poly], f: &Poly| -> Result<Option<(bool, Value)>> {
        let (closure, method) = if opts.engine.is_admissible(ctx, &ClosureStrategy::Exhaustive) {
            (opts.engine.s_closure(gens, ctx, &ClosureStrategy::Exhaustive)?, "exhaustive")
        } else {
            match opts.engine.additive_s_closure(gens, ctx) {
                Ok(c) => (c, "additive"),
                Err(ClosureError::NotAdditive(_)) => return Ok(None),
                Err(e) => return Err(e.into()),
            }
        };
        let member = closure.basis.contains(&ctx.project(f)?)?;
        let detail = json!({"n": ctx.n(), "D": ctx.dim(), "closure_dim": closure.basis.dim(), "method": method, "member": member});
        Ok(Some((member, detail)))
    };
    let skip_random = json!({"reason": "non-membership needs an exact closure"});

    let claim = "x^(q+1) is not in {x + x^q}^S";
    if opts.search != Search::Exhaustive {
        rep.push(claim, "summary", Status::Skipped, skip_random.clone());
    } else {
        let gens = [Poly::sum_of_monomials(&field, &[1, qq])?];
        let f = Poly::sum_of_monomials(&field, &[qq + 1])?;
        let mut levels = Vec::new();
        let mut status = Status::Inconclusive;
        for n in 1..=2 {
            let ctx = QuotCtx::new(&field, n)?;
            let Some((member, detail)) = decide(&ctx, &gens, &f)? else { break };
            levels.push(detail);
            if !member {
                status = Status::Pass;
                break;
            }
        }
        rep.push(claim, "summary", status, json!({"element": poly_json(&f), "levels": levels}));
    }

    if field.spec().p == 2 {
        let claim = "x + x^q is not in W_2";
        let a2 = QuotCtx::new(&field, 2)?;
        if opts.search != Search::Exhaustive {
            rep.push(claim, "summary", Status::Skipped, skip_random);
        } else if !opts.engine.is_admissible(&a2, &ClosureStrategy::Exhaustive) {
            rep.push(claim, "summary", Status::Skipped, skip_reason(&a2));
        } else {
            let f = Poly::sum_of_monomials(&field, &[1, qq])?;
            let (member, mut detail) = decide(&a2, &wn_generators(&field, 2)?, &f)?.expect("exhaustive");
            detail["element"] = poly_json(&f);
            rep.push(claim, "summary", if member { Status::Fail } else { Status::Pass }, detail);
        }
    }
    Ok(rep)
}

/// Digit-product binomials and the four closed forms for one `q`.
pub fn suite_binom(q: u32, opts: &Options) -> Result<SuiteReport> {
    let qq = u64::from(q);
    let (p, _) = prime_power(qq)?;
    let mut rep = SuiteReport::new(
        "binom",
        Params {
            q: Some(q),
            ..Params::default()
        },
        None,
    )
    .with_timings(opts.timings);

    rep.run("C(tq+r, jq+i) = C(t,j) C(r,i) mod p", "fines application", || {
        let mut bad = None;
        'outer: for t in 0..qq {
            for r in 0..qq {
                for j in 0..qq {
                    for i in 0..qq {
                        let lhs = binom_mod_p(t * qq + r, j * qq + i, p).expect("prime");
                        let rhs = fines_app(t, r, j, i, qq).expect("in range");
                        if lhs != rhs {
                            bad = Some(json!({"t": t, "r": r, "j": j, "i": i, "lhs": lhs, "rhs": rhs}));
                            break 'outer;
                        }
                    }
                }
            }
        }
        match bad {
            None => (Status::Pass, json!({"cases": qq.pow(4)})),
            Some(b) => (Status::Fail, b),
        }
    });

    for case in Case::ALL {
        let rows = case_table(case, qq)?;
        let bad: Vec<_> = rows.iter().filter(|r| !r.matches()).take(5).cloned().collect();
        let status = if bad.is_empty() { Status::Pass } else { Status::Fail };
        rep.push(
            &format!("closed form of case {case} matches the digit product"),
            "special fines result",
            status,
            json!({"rows": rows.len(), "mismatches": bad}),
        );
    }
    Ok(rep)
}

/// The two-variable identities for one `q`.
pub fn suite_identities(q: u32, opts: &Options) -> Result<SuiteReport> {
    let field = field_for_q(q)?;
    let mut rep = SuiteReport::new(
        "identities",
        Params {
            q: Some(q),
            seed: Some(opts.seed),
            trials: Some(20),
            ..Params::default()
        },
        Some(field.spec().clone()),
    )
    .with_timings(opts.timings);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for r in 1..u64::from(q) {
        let mut bad = None;
        for _ in 0..20 {
            let alphas = random_alphas(&field, r, &mut rng)?;
            if !check_g_formula(&field, r, &alphas)? {
                bad = Some(alphas);
                break;
            }
        }
        let anchor = if r == 1 { "base case" } else { "main inductive step" };
        let (status, detail) = match bad {
            None => (Status::Pass, json!({"class": r, "trials": 20})),
            Some(a) => (Status::Fail, json!({"class": r, "alphas": alphas_json(&field, &a)})),
        };
        rep.push("direct expansion of g equals its closed form", anchor, status, detail);
    }

    let a1 = QuotCtx::new(&field, 1)?;
    for r in (3..u64::from(q).saturating_sub(1)).step_by(2) {
        let h = h_of_binomial_f(&a1, r)?;
        let status = if h.holds() { Status::Pass } else { Status::Fail };
        rep.push(
            "h is a nonzero element of span(E_1) matching its closed form",
            "main inductive step",
            status,
            json!({
                "r": r,
                "h": elt_json(&h.h),
                "closed_form": elt_json(&h.closed_form),
                "in_en_span": h.in_en_span,
                "beta": field.coords(h.beta),
                "diagonal": field.coords(h.diagonal),
            }),
        );
    }

    if q == 2 {
        let x = |e: &[u64]| Poly::sum_of_monomials(&field, e);
        let cases = [(vec![x(&[1, 2])?], x(&[1, 2])?), (vec![x(&[1, 2])?], x(&[1])?), (vec![x(&[1])?], x(&[3])?), (vec![x(&[3])?], x(&[1, 2])?)];
        for (gens, f) in cases {
            let s = bivar_closure_spotcheck(&opts.engine, &gens, &f, &ClosureStrategy::Exhaustive)?;
            let status = if s.agree() { Status::Pass } else { Status::Fail };
            rep.push(
                "one- and two-variable closure membership agree",
                "commutative in kxy",
                status,
                json!({
                    "generators": gens.iter().map(poly_json).collect::<Vec<_>>(),
                    "f": poly_json(&f),
                    "univariate": s.univariate,
                    "bivariate": s.bivariate,
                }),
            );
        }
    }
    Ok(rep)
}

fn alphas_json(field: &Gf, a: &BTreeMap<u64, Fe>) -> Value {
    json!(a.iter().map(|(t, c)| (t.to_string(), field.coords(*c))).collect::<BTreeMap<_, _>>())
}

/// Dispatches by suite name.
pub fn run_suite(name: &str, args: &SuiteArgs, opts: &Options) -> Result<SuiteReport> {
    let q = args.q;
    match name {
        "bases" => suite_bases(q, args.n.unwrap_or(1), opts),
        "wn-props" => suite_wn_props(q, args.n.unwrap_or(1), opts),
        "containment" => suite_containment(q, args.r.unwrap_or(0), args.m.unwrap_or(3), opts),
        "sum" => suite_sum(q, args.r.unwrap_or(0), args.s.unwrap_or(1), opts),
        "maximality" => suite_maximality(q, args.n.unwrap_or(1), opts),
        "summary" => suite_summary(q, opts),
        "binom" => suite_binom(q, opts),
        "identities" => suite_identities(q, opts),
        other => Err(SuiteError::Precondition(format!(
            "unknown suite {other:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

/// Numeric parameters of a suite run.
#[derive(Debug, Clone, Default)]
pub struct SuiteArgs {
    pub q: u32,
    pub n: Option<u32>,
    pub r: Option<u32>,
    pub s: Option<u32>,
    pub m: Option<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options {
            engine: Engine::with_threads(2),
            trials: 50,
            ..Options::default()
        }
    }

    #[test]
    fn power_normal_form() {
        let c = QuotCtx::new(&field_for_q(3).unwrap(), 1).unwrap();
        assert_eq!(nf_of_power(&c, 3, 0), 3);
        assert_eq!(nf_of_power(&c, 3, 1), 4);
        assert_eq!(nf_of_power(&c, 2, 0), 1);
        assert_eq!(nf_of_power(&c, 0, 7), 8);
        let c = QuotCtx::new(&field_for_q(2).unwrap(), 1).unwrap();
        assert_eq!(nf_of_power(&c, 3, 0), 2);
        assert_eq!(nf_of_power(&c, 3, 1), 3);
    }

    #[test]
    fn combinations() {
        let f = field_for_q(3).unwrap();
        let b = b1r_set(&f, 1).unwrap();
        let all = nonzero_combinations(&f, &b).unwrap();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|p| !p.is_zero()));
    }

    #[test]
    fn small_suites_pass() {
        let o = opts();
        for rep in [
            suite_bases(2, 1, &o).unwrap(),
            suite_containment(2, 0, 3, &o).unwrap(),
            suite_containment(2, 0, 1, &o).unwrap(),
            suite_maximality(2, 1, &o).unwrap(),
            suite_summary(2, &o).unwrap(),
            suite_wn_props(2, 1, &o).unwrap(),
        ] {
            assert_eq!(rep.exit_code(), 0, "{}", rep.to_json());
        }
    }

    #[test]
    fn preconditions() {
        let o = opts();
        assert!(suite_containment(2, 0, 2, &o).is_err());
        assert!(suite_sum(2, 0, 0, &o).is_err());
        assert!(field_for_q(6).is_err());
    }

    #[test]
    fn inadmissible_exhaustive_is_skipped() {
        let rep = suite_bases(7, 1, &opts()).unwrap();
        assert_eq!(rep.exit_code(), 2);
    }
}
