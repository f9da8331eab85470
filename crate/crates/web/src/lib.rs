//! Browser bindings: three JSON-returning operations for the static demo page.
//!
//! Every export takes plain strings and numbers and returns a JSON string, so
//! the page needs no generated TypeScript types. The same functions are
//! callable natively for testing.

use std::collections::BTreeMap;

use gcdmoment_core::igusa;
use gcdmoment_core::moments::{self, Exponent, MomentQuery, MomentValue, Verifier};
use gcdmoment_core::numtheory;
use gcdmoment_core::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest sample space the page will enumerate.
pub const WEB_CAP: u64 = 2_000_000;

fn parse_moduli(s: &str) -> Result<Vec<u64>, String> {
    let parts: Vec<&str> = s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
    if parts.is_empty() {
        return Err("enter at least one modulus".into());
    }
    parts
        .iter()
        .map(|t| match t.parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{t:?} is not a positive integer")),
        })
        .collect()
}

fn value_json(v: &MomentValue) -> Value {
    match v {
        MomentValue::Exact(q) => json!({ "exact": moments::render_rational(q), "approx": moments::rational_to_f64(q) }),
        MomentValue::Approx(z) => json!({ "re": z.re, "im": z.im }),
    }
}

/// E[X^w] by every applicable route, plus the Euler-product local factors.
pub fn moment_json(moduli: &str, w: &str) -> Result<String, String> {
    let moduli = parse_moduli(moduli)?;
    let w: Exponent = w.trim().parse().map_err(|e: gcdmoment_core::Error| e.to_string())?;
    let query = MomentQuery::new(moduli.clone(), w).map_err(|e| e.to_string())?;
    let verifier = Verifier { cap: WEB_CAP, ..Verifier::default() };
    let report = verifier.verify(&query).map_err(|e| e.to_string())?;
    let routes: Vec<Value> =
        report.routes().iter().map(|(name, v)| json!({ "route": name, "value": value_json(v) })).collect();
    let local: Vec<Value> = moments::local_factor_table(&moduli, &w)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|(p, v)| json!({ "p": p, "value": value_json(v) }))
        .collect();
    Ok(json!({
        "moduli": moduli,
        "w": w.to_string(),
        "routes": routes,
        "local_factors": local,
        "agree": report.agree,
        "max_abs_diff": report.max_abs_diff,
    })
    .to_string())
}

/// Histogram of X(l) = prod gcd(l, n_j) over one period l = 1..=lcm.
pub fn distribution_json(moduli: &str) -> Result<String, String> {
    let moduli = parse_moduli(moduli)?;
    let lcm = numtheory::lcm_all(&moduli).map_err(|e| e.to_string())?;
    let lcm = u64::try_from(lcm).ok().filter(|&l| l <= WEB_CAP).ok_or_else(|| format!("lcm exceeds {WEB_CAP}"))?;
    let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
    for l in 1..=lcm {
        let x = moduli.iter().map(|&n| numtheory::gcd(l, n) as u128).product();
        *counts.entry(x).or_default() += 1;
    }
    let bins: Vec<Value> = counts.iter().map(|(x, c)| json!({ "x": x.to_string(), "count": c })).collect();
    Ok(json!({ "moduli": moduli, "lcm": lcm, "bins": bins }).to_string())
}

/// `ε · ℜ ζ^I(r + 1 + ε)` on a log-spaced grid from 10⁻¹ down to 10⁻⁴,
/// with the extrapolated residue and its exact target.
pub fn residue_curve_json(r: u32, moduli: &str, points: u32) -> Result<String, String> {
    let moduli = parse_moduli(moduli)?;
    let points = points.clamp(2, 200);
    let curve = (0..points)
        .map(|i| {
            let eps = 10f64.powf(-1.0 - 3.0 * i as f64 / (points - 1) as f64);
            let s = Complex64::new(r as f64 + 1.0 + eps, 0.0);
            igusa::zeta_hurwitz_sum(r, &moduli, s).map(|z| json!({ "eps": eps, "value": eps * z.re }))
        })
        .collect::<Result<Vec<Value>, _>>()
        .map_err(|e| e.to_string())?;
    let est = igusa::residue_at_pole(r, &moduli).map_err(|e| e.to_string())?;
    Ok(json!({
        "r": r,
        "moduli": moduli,
        "curve": curve,
        "estimate": est.estimate,
        "target": moments::render_rational(&est.target),
        "target_approx": moments::rational_to_f64(&est.target),
        "relative_error": est.relative_error,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn moment(moduli: &str, w: &str) -> Result<String, JsError> {
    moment_json(moduli, w).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn distribution(moduli: &str) -> Result<String, JsError> {
    distribution_json(moduli).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = residueCurve)]
pub fn residue_curve(r: u32, moduli: &str, points: u32) -> Result<String, JsError> {
    residue_curve_json(r, moduli, points).map_err(|e| JsError::new(&e))
}
