//! Browser bindings. Every export takes plain values and returns a JSON
//! string; errors come back as `{"error": "..."}`.

use qhecke::cyclo::duality_check;
use qhecke::family::u_tm;
use qhecke::format::{parse_monomial, series_json, series_text};
use qhecke::verify::{list_identities, run_identity, Params};
use qhecke::{Error, QExp};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(e: impl std::fmt::Display) -> Value {
    json!({ "error": e.to_string() })
}

fn order(s: &str) -> Result<QExp, Error> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad order `{s}`")))
}

/// U_t^(m)(x; q) with `x` a monomial string, as series JSON plus the text
/// rendering.
pub fn expand_u_json(t: i64, m: i64, x: &str, ord: &str) -> Value {
    let run = || -> Result<Value, Error> {
        let s = u_tm(t, m, &parse_monomial(x)?, order(ord)?)?;
        Ok(json!({ "series": series_json(&s), "text": series_text(&s) }))
    };
    run().unwrap_or_else(error)
}

/// Runs a registered identity; `params` is a JSON object of integers.
pub fn verify_json(name: &str, params: &str, ord: &str) -> Value {
    let run = || -> Result<Value, Error> {
        let raw: Value = serde_json::from_str(if params.trim().is_empty() { "{}" } else { params })
            .map_err(|e| Error::Parse(e.to_string()))?;
        let obj = raw.as_object().ok_or_else(|| Error::Parse("params must be a JSON object".into()))?;
        let mut ps = Params::new();
        for (k, v) in obj {
            let n = v
                .as_i64()
                .or_else(|| v.as_str().and_then(|s| s.trim().parse().ok()))
                .ok_or_else(|| Error::Parse(format!("parameter {k} is not an integer")))?;
            ps.insert(k.clone(), n);
        }
        let rep = run_identity(name, &ps, order(ord)?)?;
        Ok(json!({ "report": rep.to_json(), "text": rep.to_string() }))
    };
    run().unwrap_or_else(error)
}

/// F and U at ζ_N for N = 1..=n_max.
pub fn duality_grid_json(t: i64, m: i64, n_max: u64) -> Value {
    let run = || -> Result<Value, Error> {
        let mut rows = Vec::new();
        let mut all = true;
        for n in 1..=n_max {
            let r = duality_check(t, m, n)?;
            all &= r.is_equal();
            rows.push(json!({
                "N": n,
                "verdict": r.verdict.to_string(),
                "difference": r.difference.as_ref().map(|d| json!({ "left": d.left, "right": d.right })),
            }));
        }
        Ok(json!({ "all_equal": all, "rows": rows }))
    };
    run().unwrap_or_else(error)
}

pub fn identities_json() -> Value {
    list_identities()
        .iter()
        .map(|d| {
            json!({
                "name": d.name,
                "anchor": d.anchor,
                "params": d.params.iter().map(|p| json!({ "name": p.name, "default": p.default })).collect::<Vec<_>>(),
            })
        })
        .collect()
}

#[wasm_bindgen]
pub fn expand_u(t: i32, m: i32, x: &str, order: &str) -> String {
    expand_u_json(t.into(), m.into(), x, order).to_string()
}

#[wasm_bindgen]
pub fn verify(name: &str, params: &str, order: &str) -> String {
    verify_json(name, params, order).to_string()
}

#[wasm_bindgen]
pub fn duality_grid(t: i32, m: i32, n_max: u32) -> String {
    duality_grid_json(t.into(), m.into(), n_max.into()).to_string()
}

#[wasm_bindgen]
pub fn identities() -> String {
    identities_json().to_string()
}
