//! JSON encoding of model parameter sets.
//!
//! Complex numbers are `[re, im]`, matrices are row-major arrays of rows.

use crate::linalg::RMat;
use crate::model::ModelParams;
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: Vec<[f64; 2]>,
    #[serde(rename = "eB")]
    e_b: Vec<Vec<f64>>,
    f: Vec<Vec<f64>>,
    g: Vec<[f64; 2]>,
    h: Vec<f64>,
    epsilon: f64,
    m: usize,
}

fn cx(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn matrix(rows: &[Vec<f64>], name: &str) -> Result<RMat> {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension(format!("{name}: ragged rows")));
    }
    Ok(RMat::from_fn(n, cols, |i, j| rows[i][j]))
}

pub fn matrix_to_json(m: &RMat) -> Value {
    Value::Array(
        (0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| Value::from(m[(i, j)])).collect())).collect(),
    )
}

/// Parses a model document; errors carry serde's line/column context.
pub fn parse_model(text: &str) -> Result<ModelParams> {
    let raw: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let p = ModelParams {
        a: cx(raw.a),
        b: cx(raw.b),
        c: cx(raw.c),
        d: raw.d.into_iter().map(cx).collect(),
        e_b: matrix(&raw.e_b, "eB")?,
        f: matrix(&raw.f, "f")?,
        g: raw.g.into_iter().map(cx).collect(),
        h: raw.h,
        epsilon: raw.epsilon,
        m: raw.m,
    };
    p.check_dimensions()?;
    Ok(p)
}

pub fn model_to_json(p: &ModelParams) -> Value {
    let z = |v: C64| Value::from(vec![v.re, v.im]);
    serde_json::json!({
        "a": z(p.a),
        "b": z(p.b),
        "c": z(p.c),
        "d": p.d.iter().map(|v| z(*v)).collect::<Vec<_>>(),
        "eB": matrix_to_json(&p.e_b),
        "f": matrix_to_json(&p.f),
        "g": p.g.iter().map(|v| z(*v)).collect::<Vec<_>>(),
        "h": p.h,
        "epsilon": p.epsilon,
        "m": p.m,
    })
}
