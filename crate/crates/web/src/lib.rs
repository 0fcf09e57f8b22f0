//! wasm-bindgen entry points for `www/index.html`.
//!
//! Step functions cross the boundary as the same JSON the CLI reads:
//! `[[end, value], ...]` with increasing right endpoints.

use boyd::operators::theta_distribution;
use boyd::spaces::SpaceSpec;
use boyd::StepFunction;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse_fn(text: &str) -> Result<StepFunction, String> {
    serde_json::from_str(text).map_err(|e| format!("step function: {e}"))
}

/// E-norm of `f`, with `space` in the CLI grammar (`lp:2`, `lorentz:3,1`, `orlicz:power:2`, ...).
#[wasm_bindgen]
pub fn norm(space: &str, f: &str) -> Result<String, String> {
    let space: SpaceSpec = space.parse().map_err(|e: boyd::Error| e.to_string())?;
    let f = parse_fn(f)?;
    Ok(format!("{:.12}", space.norm(&f)))
}

/// Decreasing rearrangement as `{"ends": [...], "values": [...]}`.
#[wasm_bindgen]
pub fn rearrangement(f: &str) -> Result<String, String> {
    let mu = parse_fn(f)?.rearrangement();
    Ok(json!({ "ends": mu.ends(), "values": mu.values() }).to_string())
}

/// d(v; f) and d(v; Θ_{p,q} f) on `points` log-spaced levels.
///
/// Pass `q = Infinity` for the one-sided operator. Infinite distribution
/// values come back as `null`.
#[wasm_bindgen]
pub fn theta_profile(f: &str, p: f64, q: f64, points: usize) -> Result<String, String> {
    let f = parse_fn(f)?;
    let theta = theta_distribution(&f, p, q).map_err(|e| e.to_string())?;
    let top = f.max_value().max(theta.max_level()).max(1e-300);
    let (lo, hi) = ((top * 1e-4).ln(), (top * 1.25).ln());
    let n = points.max(2);
    let finite = |x: f64| if x.is_finite() { json!(x) } else { json!(null) };
    let mut v = Vec::with_capacity(n);
    let mut df = Vec::with_capacity(n);
    let mut dt = Vec::with_capacity(n);
    for i in 0..n {
        let level = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
        v.push(level);
        df.push(finite(f.distribution(level).map_err(|e| e.to_string())?));
        dt.push(finite(theta.eval(level)));
    }
    Ok(json!({ "v": v, "f": df, "theta": dt }).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_matches_cli() {
        assert_eq!(norm("lp:2", "[[4,1]]").unwrap(), "2.000000000000");
        assert!(norm("lq:2", "[[4,1]]").unwrap_err().contains("lq"));
    }

    #[test]
    fn rearrangement_sorts() {
        let out: serde_json::Value = serde_json::from_str(&rearrangement("[[1,1],[2,3]]").unwrap()).unwrap();
        assert_eq!(out["values"], json!([3.0, 1.0]));
        assert_eq!(out["ends"], json!([1.0, 2.0]));
    }

    #[test]
    fn profile_dominates() {
        let out: serde_json::Value = serde_json::from_str(&theta_profile("[[1,1]]", 1.0, 4.0, 16).unwrap()).unwrap();
        assert_eq!(out["v"].as_array().unwrap().len(), 16);
        let last = out["theta"].as_array().unwrap().last().unwrap().as_f64().unwrap();
        assert!(last > 0.0);
    }
}
