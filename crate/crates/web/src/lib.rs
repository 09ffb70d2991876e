//! Browser bindings: noise-stability curve, influence profile and Fourier
//! weight histogram of an operator given as JSON.
//!
//! Each export is a thin wrapper over a plain function so the logic can be
//! tested natively.

use qcube::generators::{self, FamilySpec, Kind};
use qcube::influence;
use qcube::io::{self, Format};
use qcube::semigroup;
use wasm_bindgen::prelude::*;

/// Largest qubit count the page offers; dense work grows as `8^n`.
pub const DEMO_MAX_N: usize = 6;

fn parse(operator_json: &str) -> Result<qcube::QOperator, String> {
    let op = io::from_json(operator_json).map_err(|e| e.to_string())?;
    if op.n() > DEMO_MAX_N {
        return Err(format!("demo is limited to n ≤ {DEMO_MAX_N}"));
    }
    Ok(op)
}

pub fn generate_operator(kind: &str, n: usize, seed: u64) -> Result<String, String> {
    if n > DEMO_MAX_N {
        return Err(format!("demo is limited to n ≤ {DEMO_MAX_N}"));
    }
    let kind: Kind = kind.parse().map_err(|e: qcube::Error| e.to_string())?;
    let op = generators::generate(&FamilySpec::new(kind, n, seed)).map_err(|e| e.to_string())?;
    Ok(io::to_json(&op, Format::Pauli))
}

/// `S_δ` at `points` evenly spaced δ in `[0, 1]`.
pub fn stability_curve(operator_json: &str, points: usize) -> Result<Vec<f64>, String> {
    let op = parse(operator_json)?;
    let steps = points.max(2) - 1;
    (0..=steps)
        .map(|i| semigroup::noise_stability(&op, i as f64 / steps as f64).map_err(|e| e.to_string()))
        .collect()
}

/// `Inf_j^p` for every qubit `j`.
pub fn influences(operator_json: &str, p: f64) -> Result<Vec<f64>, String> {
    let op = parse(operator_json)?;
    influence::influence_profile(&op, p)
        .map(|prof| prof.per_coordinate)
        .map_err(|e| e.to_string())
}

/// `W_{=d}` for `d = 0..=n`.
pub fn weights(operator_json: &str) -> Result<Vec<f64>, String> {
    Ok(influence::fourier_weights(&parse(operator_json)?).by_degree)
}

#[wasm_bindgen(js_name = generate)]
pub fn generate_js(kind: &str, n: usize, seed: u32) -> Result<String, JsError> {
    generate_operator(kind, n, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = stabilityCurve)]
pub fn stability_curve_js(operator_json: &str, points: usize) -> Result<Vec<f64>, JsError> {
    stability_curve(operator_json, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = influenceProfile)]
pub fn influences_js(operator_json: &str, p: f64) -> Result<Vec<f64>, JsError> {
    influences(operator_json, p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fourierWeights)]
pub fn weights_js(operator_json: &str) -> Result<Vec<f64>, JsError> {
    weights(operator_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kinds)]
pub fn kinds_js() -> Vec<String> {
    Kind::ALL.iter().map(|k| k.name().to_string()).collect()
}
