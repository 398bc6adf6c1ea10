//! Parsing of the JSON arguments. Every error names the offending flag or
//! field in one line.

use std::fs;

use bjorth::{OperatorMatrix, Settings, Space, SpaceDescriptor};
use serde_json::Value;

use crate::args::SpaceArgs;
use crate::UsageError;

/// Inline JSON when the text starts like JSON, otherwise a file path.
fn load(flag: &str, text: &str) -> Result<Value, UsageError> {
    let t = text.trim_start();
    let body = if t.starts_with('{') || t.starts_with('[') {
        text.to_string()
    } else {
        fs::read_to_string(text).map_err(|e| UsageError(format!("--{flag}: cannot read {text:?}: {e}")))?
    };
    serde_json::from_str(&body).map_err(|e| UsageError(format!("--{flag}: invalid JSON: {e}")))
}

pub fn space(args: &SpaceArgs, settings: Settings) -> Result<Space, UsageError> {
    let space = match args.space.as_deref() {
        Some("hexagon") => Space::hexagon(),
        Some(text) => {
            let v = load("space", text)?;
            let d: SpaceDescriptor =
                serde_json::from_value(v).map_err(|e| UsageError(format!("--space: {e}")))?;
            Space::new(d).map_err(|e| UsageError(format!("--space: {e}")))?
        }
        None => {
            let p: f64 = match args.p.as_str() {
                "inf" | "infinity" => f64::INFINITY,
                s => s.parse().map_err(|_| UsageError(format!("--p: not a number: {s:?}")))?,
            };
            Space::lp(args.dim, p).map_err(|e| UsageError(format!("--p/--dim: {e}")))?
        }
    };
    space.with(settings).map_err(|e| UsageError(format!("configuration: {e}")))
}

pub fn matrix_value(flag: &str, v: Value) -> Result<OperatorMatrix, UsageError> {
    let v = if v.is_array() { serde_json::json!({ "matrix": v }) } else { v };
    serde_json::from_value(v).map_err(|e| UsageError(format!("{flag}: {e}")))
}

pub fn matrix(flag: &str, text: &str) -> Result<OperatorMatrix, UsageError> {
    matrix_value(&format!("--{flag}"), load(flag, text)?)
}

fn field(obj: &Value, name: &str) -> Result<Value, UsageError> {
    obj.get(name)
        .cloned()
        .ok_or_else(|| UsageError(format!("--operands: missing field `{name}`")))
}

pub fn vector_operands(text: &str) -> Result<(Vec<f64>, Vec<f64>), UsageError> {
    let v = load("operands", text)?;
    let get = |name: &str| -> Result<Vec<f64>, UsageError> {
        serde_json::from_value(field(&v, name)?)
            .map_err(|e| UsageError(format!("--operands: field `{name}`: {e}")))
    };
    Ok((get("x")?, get("y")?))
}

pub fn operator_operands(text: &str) -> Result<(OperatorMatrix, OperatorMatrix), UsageError> {
    let v = load("operands", text)?;
    let t = matrix_value("--operands: field `t`", field(&v, "t")?)?;
    let a = matrix_value("--operands: field `a`", field(&v, "a")?)?;
    Ok((t, a))
}

pub fn check_dim(what: &str, got: usize, space: &Space) -> Result<(), UsageError> {
    if got != space.dim() {
        return Err(UsageError(format!("{what}: dimension {got} does not match the space dimension {}", space.dim())));
    }
    Ok(())
}
