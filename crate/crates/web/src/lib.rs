//! WebAssembly bindings for the browser demo in `www/`. Every export takes
//! plain numbers and strings and returns a JSON string.

use flrw_core::criteria::{full_report, Curvature, SpacetimeSpec};
use flrw_core::probe::{probe, witness_degeneracy, CurveKind, CurveSpec};
use flrw_core::scale_factor::{parse_endpoint, ScaleFactor};
use flrw_core::sph_chart::{g_of, Branch};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Cap on grid side length so a slider cannot freeze the tab.
pub const MAX_GRID: usize = 200;

pub fn spec_of(k: i32, a: &str, t_inf: &str, t_sup: &str) -> Result<SpacetimeSpec, String> {
    let curvature = Curvature::from_k(k.into()).ok_or(format!("K = {k} is not -1, 0 or 1"))?;
    let lo = parse_endpoint(t_inf).ok_or(format!("bad lower endpoint {t_inf:?}"))?;
    let hi = parse_endpoint(t_sup).ok_or(format!("bad upper endpoint {t_sup:?}"))?;
    let sf = ScaleFactor::new(a, lo, hi).map_err(|e| e.to_string())?;
    Ok(SpacetimeSpec::new(curvature, 3, sf))
}

fn branch_of(spec: &SpacetimeSpec) -> Result<Branch, String> {
    match spec.k {
        Curvature::Flat => Ok(Branch::Flat),
        Curvature::Hyperbolic => Ok(Branch::Hyperbolic),
        Curvature::Spherical => Err("charts need K = 0 or K = -1".into()),
    }
}

fn to_json(v: Value) -> Result<String, String> {
    serde_json::to_string(&v).map_err(|e| e.to_string())
}

pub fn classify_json(k: i32, a: &str, t_inf: &str, t_sup: &str) -> Result<String, String> {
    to_json(json!(full_report(&spec_of(k, a, t_inf, t_sup)?)))
}

/// `G(t, r)` on an `n × n` grid; `null` where `G` is undefined (the
/// degenerate set or outside the interval).
pub fn g_field_json(
    k: i32,
    a: &str,
    t_inf: &str,
    t_sup: &str,
    t_range: (f64, f64),
    r_range: (f64, f64),
    n: usize,
) -> Result<String, String> {
    let spec = spec_of(k, a, t_inf, t_sup)?;
    let branch = branch_of(&spec)?;
    if !(2..=MAX_GRID).contains(&n) {
        return Err(format!("grid size {n} outside 2..={MAX_GRID}"));
    }
    if !(t_range.0 < t_range.1 && r_range.0 < r_range.1 && r_range.0 >= 0.0) {
        return Err("ranges need lo < hi and r ≥ 0".into());
    }
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let (ts, rs) = (axis(t_range), axis(r_range));
    let rows: Vec<Vec<Value>> = ts
        .iter()
        .map(|&t| {
            rs.iter()
                .map(|&r| match g_of(branch, &spec.sf, t, r) {
                    Ok(g) if g.is_finite() => json!(g),
                    _ => Value::Null,
                })
                .collect()
        })
        .collect();
    to_json(json!({ "t": ts, "r": rs, "G": rows }))
}

/// Constant-`R` probe toward the Big Bang together with the witness search
/// at threshold `eps`.
pub fn probe_json(k: i32, a: &str, t_inf: &str, t_sup: &str, r0: f64, theta: f64, eps: f64) -> Result<String, String> {
    let spec = spec_of(k, a, t_inf, t_sup)?;
    let curve = CurveSpec {
        kind: CurveKind::ConstantR { r0 },
        theta,
    };
    let result = probe(&spec, &curve, 0.5).map_err(|e| e.to_string())?;
    let witness = witness_degeneracy(&spec, r0, theta, eps).map_err(|e| e.to_string())?;
    let l = &result.limits;
    let limit = |d: &flrw_core::scale_factor::LimitDiag| json!({ "kind": d.kind, "note": d.note });
    to_json(json!({
        "samples": result.samples,
        "limits": {
            "R": limit(&l.big_r),
            "G": limit(&l.g),
            "C": limit(&l.c),
            "r2_aprime2": limit(&l.r2ap2),
        },
        "witness": witness,
    }))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classify(k: i32, a: &str, t_inf: &str, t_sup: &str) -> Result<String, JsValue> {
    js(classify_json(k, a, t_inf, t_sup))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn g_field(
    k: i32,
    a: &str,
    t_inf: &str,
    t_sup: &str,
    t_lo: f64,
    t_hi: f64,
    r_lo: f64,
    r_hi: f64,
    n: usize,
) -> Result<String, JsValue> {
    js(g_field_json(k, a, t_inf, t_sup, (t_lo, t_hi), (r_lo, r_hi), n))
}

#[wasm_bindgen]
pub fn probe_trace(k: i32, a: &str, t_inf: &str, t_sup: &str, r0: f64, theta: f64, eps: f64) -> Result<String, JsValue> {
    js(probe_json(k, a, t_inf, t_sup, r0, theta, eps))
}
