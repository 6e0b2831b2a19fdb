//! Browser bindings for the Pólya tree workbench. Every export returns a JSON
//! string; the page in `www/` draws it.

use std::cell::OnceCell;

use polya_core::asymptotics::{compute_constants, forest_table, SingularityConstants};
use polya_core::sampler::{PolyaSampler, RngStream};
use polya_core::series::ctree_polynomials;
use polya_core::tree::{aut_order, fixed_point_polynomial, orbit_count};
use polya_core::{CanonicalTree, Error, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest tree the page will sample and draw.
pub const MAX_SAMPLE: usize = 400;
/// Largest tree accepted for the exact fixed-point law.
pub const MAX_ANALYZE: usize = 60;
/// Largest m in the forest-size table.
pub const MAX_TABLE: usize = 40;

thread_local! {
    static CONSTANTS: OnceCell<SingularityConstants> = const { OnceCell::new() };
}

fn with_constants<R>(f: impl FnOnce(&SingularityConstants) -> Result<R>) -> Result<R> {
    CONSTANTS.with(|cell| {
        if cell.get().is_none() {
            let _ = cell.set(compute_constants(128, 50)?);
        }
        f(cell.get().expect("constants set above"))
    })
}

fn cap(what: &'static str, requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        return Err(Error::ResourceCap { what, requested, cap });
    }
    Ok(())
}

/// Seed in decimal or 0x-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim().replace('_', "");
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| Error::Parse(format!("seed {s:?}: {e}")))
}

/// A uniform tree of size `n` and the decomposition along a uniform
/// automorphism: parents in preorder, the C-node mask and the forest sizes.
pub fn sample_json(n: usize, seed: &str) -> Result<Value> {
    cap("tree size", n, MAX_SAMPLE)?;
    let seed = parse_seed(seed)?;
    let sampler = PolyaSampler::new(n)?;
    let mut rng = RngStream::new(seed, 0);
    let d = sampler.sample_decomposition(n, &mut rng)?;
    let parents: Vec<Value> = d.tree().parents().iter().map(|p| json!(p)).collect();
    let forests: Vec<Value> = d.forests().iter().map(|&(v, s)| json!([v, s])).collect();
    Ok(json!({
        "seed": seed.to_string(),
        "tree": d.tree().to_parens(),
        "parents": parents,
        "c_mask": d.c_mask(),
        "c_size": d.c_size(),
        "max_forest": d.max_forest(),
        "forests": forests,
    }))
}

/// Limiting law of the forest size at a random C-node, m = 0..=max_m.
pub fn forest_law_json(max_m: usize) -> Result<Value> {
    cap("table rows", max_m, MAX_TABLE)?;
    with_constants(|k| {
        let rows: Vec<Value> = forest_table(max_m, k)?
            .iter()
            .map(|r| json!({ "m": r.m, "eq": r.eq, "ge": r.ge }))
            .collect();
        Ok(json!({ "rho": k.rho_f64(), "b": k.b_f64(), "rows": rows }))
    })
}

/// Fixed-point law of a uniform automorphism of the given tree, next to the
/// C-tree size law of a uniform tree of the same size.
pub fn analyze_json(parens: &str) -> Result<Value> {
    let t = CanonicalTree::parse_parens(parens.trim())?;
    let n = t.size();
    cap("tree size", n, MAX_ANALYZE)?;
    let p = fixed_point_polynomial(&t);
    let table = ctree_polynomials(n)?;
    let row = table.row(n);
    let total: f64 = row.to_f64_coeffs().iter().sum();
    let tree_law: Vec<Value> = p
        .coeffs()
        .iter()
        .zip(p.to_f64_coeffs())
        .enumerate()
        .skip(1)
        .map(|(k, (c, f))| json!({ "k": k, "exact": c.to_string(), "p": f }))
        .collect();
    let size_law: Vec<f64> = row.to_f64_coeffs().iter().map(|c| c / total).collect();
    Ok(json!({
        "tree": t.to_parens(),
        "size": n,
        "aut_order": aut_order(&t).to_string(),
        "orbits": orbit_count(&t),
        "polynomial": p.to_string(),
        "tree_law": tree_law,
        "size_law": size_law,
    }))
}

fn export(v: Result<Value>) -> std::result::Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn sample(n: usize, seed: &str) -> std::result::Result<String, JsError> {
    export(sample_json(n, seed))
}

#[wasm_bindgen]
pub fn forest_law(max_m: usize) -> std::result::Result<String, JsError> {
    export(forest_law_json(max_m))
}

#[wasm_bindgen]
pub fn analyze(parens: &str) -> std::result::Result<String, JsError> {
    export(analyze_json(parens))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_is_consistent() {
        let v = sample_json(50, "0x5EED0001").unwrap();
        assert_eq!(v["parents"].as_array().unwrap().len(), 50);
        let forest_total: u64 = v["forests"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| f[1].as_u64().unwrap())
            .sum();
        assert_eq!(v["c_size"].as_u64().unwrap() + forest_total, 50);
        let marked = v["c_mask"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|b| b.as_bool().unwrap())
            .count();
        assert_eq!(marked as u64, v["c_size"].as_u64().unwrap());
        assert_eq!(sample_json(50, "1592590337").unwrap(), v);
        assert!(sample_json(MAX_SAMPLE + 1, "1").is_err());
        assert!(sample_json(5, "seed").is_err());
    }

    #[test]
    fn forest_law_rows() {
        let v = forest_law_json(3).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert!((rows[0]["eq"].as_f64().unwrap() - 0.9197).abs() < 5e-5);
        assert_eq!(rows[1]["eq"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn star_law() {
        let v = analyze_json("(()()())").unwrap();
        assert_eq!(v["aut_order"], "6");
        assert_eq!(v["orbits"], 2);
        assert_eq!(v["polynomial"], "1/6*u^4 + 1/2*u^2 + 1/3*u");
        let law: f64 = v["size_law"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .sum();
        assert!((law - 1.0).abs() < 1e-12);
        assert!(analyze_json("(()").is_err());
    }
}
