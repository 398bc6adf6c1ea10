//! Browser bindings for the demo page in `www/`.
//!
//! Every entry point takes and returns JSON strings. The `*_json` functions
//! hold the logic and are plain Rust so they can be tested natively; the
//! exported wrappers only convert errors for JavaScript.

use bjorth::cones::{bj_orthogonal_vectors, orthogonal_directions_2d};
use bjorth::operators::operator_norm;
use bjorth::symmetry::{scan_symmetric_points, SymmetryKind};
use bjorth::{OperatorMatrix, Settings, Space, SpaceDescriptor};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn space_from(json: &str, resolution: usize) -> Result<Space, String> {
    let d: SpaceDescriptor = serde_json::from_str(json).map_err(|e| format!("space: {e}"))?;
    let settings = Settings { resolution, ..Settings::default() };
    let s = Space::with_settings(d, settings).map_err(|e| e.to_string())?;
    if s.dim() != 2 {
        return Err("the demo draws planar spaces only".into());
    }
    Ok(s)
}

fn to_json(v: impl Serialize) -> String {
    serde_json::to_string(&v).expect("serializable")
}

#[derive(Serialize)]
struct BallView {
    /// Unit sphere traced counterclockwise from angle zero.
    boundary: Vec<Vec<f64>>,
    x: Vec<f64>,
    /// Unit directions `y` with `x ⊥_B y`; the cone is spanned by the
    /// first and last (one direction at a smooth point).
    cone: Vec<Vec<f64>>,
    /// Norming functionals of `x`.
    functionals: Vec<Vec<f64>>,
    /// Whether the reverse relation `y ⊥_B x` holds for each cone direction.
    reverse: Vec<String>,
}

/// Unit sphere of the space with the orthogonality cone of the unit vector
/// at angle `theta`.
pub fn unit_ball_json(space: &str, theta: f64, resolution: usize) -> Result<String, String> {
    let s = space_from(space, resolution)?;
    let boundary = s.sphere_mesh(resolution).map_err(|e| e.to_string())?;
    let x = s.normalize(&[theta.cos(), theta.sin()]).map_err(|e| e.to_string())?;
    let cone = orthogonal_directions_2d(&s, &x, resolution).map_err(|e| e.to_string())?;
    let functionals = s.support_face(&x).map_err(|e| e.to_string())?.functionals();
    let reverse = cone
        .iter()
        .map(|y| bj_orthogonal_vectors(&s, y, &x).map(|t| to_json(t.verdict).trim_matches('"').to_string()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(to_json(BallView { boundary, x, cone, functionals, reverse }))
}

/// Left- or right-symmetric points of the unit sphere.
pub fn symmetric_scan_json(space: &str, kind: &str, resolution: usize) -> Result<String, String> {
    let s = space_from(space, resolution)?;
    let kind = match kind {
        "left" => SymmetryKind::Left,
        "right" => SymmetryKind::Right,
        k => return Err(format!("kind must be left or right, got {k:?}")),
    };
    scan_symmetric_points(&s, kind, resolution).map(to_json).map_err(|e| e.to_string())
}

/// Operator norm and attainment set. `matrix` is `{"matrix": [[..],[..]]}`.
pub fn operator_norm_json(space: &str, matrix: &str, resolution: usize) -> Result<String, String> {
    let s = space_from(space, resolution)?;
    let t: OperatorMatrix = serde_json::from_str(matrix).map_err(|e| format!("matrix: {e}"))?;
    if t.dim() != 2 {
        return Err("matrix must be 2x2".into());
    }
    operator_norm(&s, &t).map(to_json).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn unit_ball(space: &str, theta: f64, resolution: usize) -> Result<String, JsError> {
    js(unit_ball_json(space, theta, resolution))
}

#[wasm_bindgen]
pub fn symmetric_scan(space: &str, kind: &str, resolution: usize) -> Result<String, JsError> {
    js(symmetric_scan_json(space, kind, resolution))
}

#[wasm_bindgen(js_name = operatorNorm)]
pub fn operator_norm_js(space: &str, matrix: &str, resolution: usize) -> Result<String, JsError> {
    js(operator_norm_json(space, matrix, resolution))
}
