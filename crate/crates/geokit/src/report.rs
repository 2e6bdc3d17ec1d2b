//! JSON reports with keys `op`, `inputs_digest`, `result` and `diagnostics`.

use geokit_core::{c64, CMat, RMat, Subspace};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// A finite float as a JSON number with `-0.0` folded to `0.0`; anything
/// else becomes `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x + 0.0)
    } else {
        Value::Null
    }
}

pub fn complex(z: c64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

/// Values ordered by real then imaginary part.
pub fn complex_list(values: &[c64]) -> Value {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Value::Array(v.into_iter().map(complex).collect())
}

pub fn matrix(m: &RMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn cmatrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

/// `{"dim": k, "basis": n×k rows}`; real subspaces only carry real parts.
pub fn subspace(s: &Subspace) -> Value {
    json!({ "dim": s.dim(), "basis": matrix(&s.real_basis()) })
}

/// SHA-256 over the input bytes and a canonical rendering of the options.
pub fn digest(input: &[u8], options: &str) -> String {
    let mut h = Sha256::new();
    h.update(input);
    h.update([0u8]);
    h.update(options.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub op: String,
    pub inputs_digest: String,
    pub result: Value,
    pub diagnostics: Value,
    pub error: Option<Value>,
}

impl Report {
    pub fn new(op: &str, inputs_digest: String) -> Self {
        Report {
            op: op.into(),
            inputs_digest,
            result: Value::Object(Map::new()),
            diagnostics: Value::Object(Map::new()),
            error: None,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("op".into(), Value::from(self.op.clone()));
        obj.insert("inputs_digest".into(), Value::from(self.inputs_digest.clone()));
        obj.insert("result".into(), self.result.clone());
        obj.insert("diagnostics".into(), self.diagnostics.clone());
        if let Some(e) = &self.error {
            obj.insert("error".into(), e.clone());
        }
        Value::Object(obj)
    }

    /// Compact for `indent == 0`, otherwise pretty-printed with `indent` spaces.
    pub fn render(&self, indent: usize) -> String {
        render(&self.to_value(), indent)
    }
}

pub fn render(v: &Value, indent: usize) -> String {
    if indent == 0 {
        return v.to_string();
    }
    let pad = vec![b' '; indent];
    let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    serde::Serialize::serialize(v, &mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_folded() {
        assert_eq!(num(-0.0).to_string(), "0.0");
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(complex(c64::new(0.0, -0.0)).to_string(), r#"{"re":0.0,"im":0.0}"#);
    }

    #[test]
    fn complex_lists_are_sorted() {
        let v = complex_list(&[c64::new(1.0, 0.0), c64::new(-1.0, 1.0), c64::new(-1.0, -1.0)]);
        assert_eq!(v[0]["im"], json!(-1.0));
        assert_eq!(v[2]["re"], json!(1.0));
    }

    #[test]
    fn indentation() {
        let mut r = Report::new("x", "d".into());
        r.result = json!({"dim": 1});
        assert_eq!(r.render(0), r#"{"op":"x","inputs_digest":"d","result":{"dim":1},"diagnostics":{}}"#);
        assert!(r.render(4).contains("\n    \"op\""));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(b"abc", "x"), digest(b"abc", "x"));
        assert_ne!(digest(b"abc", "x"), digest(b"abc", "y"));
        assert_eq!(digest(b"", "").len(), 64);
    }
}
