//! WebAssembly front end for three small explorations: the closure of a set
//! of generators in `A_n`, Lucas triangles mod `p`, and the splitting of an
//! element of `A_n` along `span(E_n) + span(Y_n)`.
//!
//! Every export has a plain Rust counterpart returning JSON so the logic can
//! be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tspace_core::binom::binom_mod_p;
use tspace_core::constructions::{en_set, yn_set};
use tspace_core::poly::parse_poly;
use tspace_core::subspace::RowSpace;
use tspace_core::suites::field_for_q;
use tspace_core::{ClosureStrategy, Engine, Fe, Poly, QuotCtx, QuotElt};

/// Substitution budget for an exhaustive search in the browser.
const BROWSER_BOUND: u128 = 1 << 20;
const MAX_TRIANGLE_ROWS: u64 = 128;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn elt_terms(e: &QuotElt) -> String {
    e.lift().to_string()
}

fn parse_list(field: &tspace_core::Gf, src: &str) -> Result<Vec<Poly>, String> {
    src.split([';', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_poly(field, s).map_err(err))
        .collect()
}

/// Closure of `gens` (separated by `;` or newlines) in `A_n`, and whether
/// `f` lies in it. Exhaustive when small enough, otherwise randomized.
pub fn closure_json(q: u32, n: u32, gens: &str, f: &str, seed: u64) -> Result<Value, String> {
    let field = field_for_q(q).map_err(err)?;
    let ctx = QuotCtx::new(&field, n).map_err(err)?;
    let gens = parse_list(&field, gens)?;
    if gens.is_empty() {
        return Err("no generators".into());
    }
    let engine = Engine { exhaustive_bound: BROWSER_BOUND, ..Engine::with_threads(1) };
    let strategy = if engine.is_admissible(&ctx, &ClosureStrategy::Exhaustive) {
        ClosureStrategy::Exhaustive
    } else {
        ClosureStrategy::randomized(seed)
    };
    let cl = engine.s_closure(&gens, &ctx, &strategy).map_err(err)?;
    let mut out = json!({
        "D": ctx.dim(),
        "dim": cl.basis.dim(),
        "codim": ctx.dim() - cl.basis.dim(),
        "exact": cl.exact,
        "strategy": strategy.name(),
        "visited": cl.visited.to_string(),
        "basis": cl.basis.elements().iter().map(elt_terms).collect::<Vec<_>>(),
    });
    if !f.trim().is_empty() {
        let v = ctx.project(&parse_poly(&field, f).map_err(err)?).map_err(err)?;
        let member = cl.basis.contains(&v).map_err(err)?;
        out["member"] = json!(match (member, cl.exact) {
            (true, _) => "yes",
            (false, true) => "no",
            (false, false) => "unknown",
        });
    }
    Ok(out)
}

/// Rows `0..rows` of Pascal's triangle reduced mod `p` by digit products.
pub fn lucas_json(p: u64, rows: u64) -> Result<Value, String> {
    if rows > MAX_TRIANGLE_ROWS {
        return Err(format!("at most {MAX_TRIANGLE_ROWS} rows"));
    }
    let mut out = Vec::with_capacity(rows as usize);
    for m in 0..rows {
        let row = (0..=m).map(|k| binom_mod_p(m, k, p)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        out.push(row);
    }
    Ok(json!({"p": p, "rows": out}))
}

/// Writes the image of `f` in `A_n` as `w + y` with `w` in `span(E_n)` and
/// `y` in `span(Y_n)`. `f` lies in `W_n` exactly when `y = 0`.
pub fn decompose_json(q: u32, n: u32, f: &str) -> Result<Value, String> {
    let field = field_for_q(q).map_err(err)?;
    let ctx = QuotCtx::new(&field, n).map_err(err)?;
    let v = ctx.project(&parse_poly(&field, f).map_err(err)?).map_err(err)?;
    let e: Vec<QuotElt> = en_set(&field, n).map_err(err)?.iter().map(|p| ctx.project(p)).collect::<Result<_, _>>().map_err(err)?;
    let y: Vec<QuotElt> = yn_set(&field, n).map_err(err)?.iter().map(|p| ctx.project(p)).collect::<Result<_, _>>().map_err(err)?;
    let d = ctx.dim();
    let k = e.len() + y.len();
    // Rows (b_i | unit_i); reducing (v | 0) leaves (0 | -c) with v = sum c_i b_i.
    let mut space = RowSpace::new(&field, d + k);
    for (i, b) in e.iter().chain(&y).enumerate() {
        let mut row = b.coeffs().to_vec();
        row.resize(d + k, Fe::ZERO);
        row[d + i] = Fe::ONE;
        space.insert(&row);
    }
    let mut target = v.coeffs().to_vec();
    target.resize(d + k, Fe::ZERO);
    let rest = space.reduce(&target);
    if rest[..d].iter().any(|c| !c.is_zero()) {
        return Err("E_n and Y_n do not span A_n".into());
    }
    let coeff = |i: usize| field.neg(rest[d + i]);
    let mut w = ctx.zero();
    for (i, b) in e.iter().enumerate() {
        w = w.add(&b.scale(coeff(i))).map_err(err)?;
    }
    let mut yp = ctx.zero();
    for (i, b) in y.iter().enumerate() {
        yp = yp.add(&b.scale(coeff(e.len() + i))).map_err(err)?;
    }
    Ok(json!({
        "D": d,
        "element": elt_terms(&v),
        "w_part": elt_terms(&w),
        "y_part": elt_terms(&yp),
        "in_wn": yp.is_zero(),
        "e_size": e.len(),
        "y_size": y.len(),
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn closure_explorer(q: u32, n: u32, gens: &str, f: &str, seed: u32) -> Result<String, JsValue> {
    to_js(closure_json(q, n, gens, f, u64::from(seed)))
}

#[wasm_bindgen]
pub fn lucas_triangle(p: u32, rows: u32) -> Result<String, JsValue> {
    to_js(lucas_json(u64::from(p), u64::from(rows)))
}

#[wasm_bindgen]
pub fn decompose(q: u32, n: u32, f: &str) -> Result<String, JsValue> {
    to_js(decompose_json(q, n, f))
}
