//! System files: a JSON object with matrices `"A"`, `"B"` and, optionally
//! and together, `"C"` and `"D"`, each given as an array of rows.

use std::fmt;
use std::path::Path;

use geokit_core::{GeoError, RMat, SystemQuad};
use serde_json::Value;

#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    /// Malformed JSON or a value of the wrong kind.
    Parse(String),
    Invalid(GeoError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "cannot read system file: {e}"),
            LoadError::Parse(msg) => write!(f, "parse error: {msg}"),
            LoadError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LoadError {}

impl From<GeoError> for LoadError {
    fn from(e: GeoError) -> Self {
        LoadError::Invalid(e)
    }
}

const KEYS: [&str; 4] = ["A", "B", "C", "D"];

pub fn load_system(path: &Path) -> Result<SystemQuad, LoadError> {
    let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
    parse_system(&text)
}

pub fn parse_system(text: &str) -> Result<SystemQuad, LoadError> {
    let value: Value = serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| LoadError::Parse("top level must be a JSON object".into()))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(LoadError::Parse(format!("unexpected key `{k}`")));
    }
    let get = |k: &str| obj.get(k).map(|v| matrix(k, v)).transpose();
    let a = get("A")?.ok_or_else(|| LoadError::Parse("missing key `A`".into()))?;
    let b = get("B")?.ok_or_else(|| LoadError::Parse("missing key `B`".into()))?;
    match (get("C")?, get("D")?) {
        (Some(c), Some(d)) => Ok(SystemQuad::new(a, b, c, d)?),
        (None, None) => Ok(SystemQuad::pair(a, b)?),
        _ => Err(GeoError::DimensionMismatch("C and D must be given together".into()).into()),
    }
}

fn entry(name: &str, v: &Value) -> Result<f64, LoadError> {
    match v {
        Value::Number(x) => x
            .as_f64()
            .ok_or_else(|| LoadError::Parse(format!("{name}: number out of range"))),
        Value::String(s) => match s.trim().parse::<f64>() {
            Ok(x) if !x.is_finite() => Err(GeoError::NonFinite(name.into()).into()),
            _ => Err(LoadError::Parse(format!("{name}: expected a number, found \"{s}\""))),
        },
        other => Err(LoadError::Parse(format!("{name}: expected a number, found {other}"))),
    }
}

fn matrix(name: &str, v: &Value) -> Result<RMat, LoadError> {
    let rows = v
        .as_array()
        .ok_or_else(|| LoadError::Parse(format!("{name}: expected an array of rows")))?;
    if rows.is_empty() {
        return Err(LoadError::Parse(format!("{name}: no rows")));
    }
    let mut data: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| LoadError::Parse(format!("{name}: each row must be an array")))?;
        data.push(row.iter().map(|x| entry(name, x)).collect::<Result<_, _>>()?);
    }
    let cols = data[0].len();
    if cols == 0 {
        return Err(LoadError::Parse(format!("{name}: empty row")));
    }
    if data.iter().any(|r| r.len() != cols) {
        return Err(GeoError::DimensionMismatch(format!("{name}: rows have different lengths")).into());
    }
    Ok(RMat::from_fn(data.len(), cols, |i, j| data[i][j]))
}

/// The JSON form read by [`parse_system`].
pub fn system_to_json(sys: &SystemQuad) -> Value {
    let rows = |m: &RMat| {
        Value::Array(
            (0..m.nrows())
                .map(|i| Value::Array((0..m.ncols()).map(|j| Value::from(m[(i, j)])).collect()))
                .collect(),
        )
    };
    let mut obj = serde_json::Map::new();
    obj.insert("A".into(), rows(&sys.a));
    obj.insert("B".into(), rows(&sys.b));
    if sys.has_output() {
        obj.insert("C".into(), rows(&sys.c));
        obj.insert("D".into(), rows(&sys.d));
    }
    Value::Object(obj)
}
