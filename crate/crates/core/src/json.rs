//! JSON interchange for rings, matrices, differential modules, complexes
//! and flag certificates.
//!
//! Entries are written as canonical strings; on input integers may also be
//! plain JSON numbers. A ring may be given as an object or in short
//! notation (`"Q[x,y]/(x*y)"`).

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::flags::FlagCertificate;
use crate::module::{DiffModule, FreeComplex, Grading};
use crate::ring::{Ring, RingMatrix, RingSpec};

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| bad(format!("missing key {key:?}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| bad(format!("{key:?} must be a nonnegative integer")))
}

fn as_i64_list(v: &Value, what: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))?
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| bad(format!("{what} must hold integers")))
        })
        .collect()
}

pub fn ring_to_json(ring: &Ring) -> Value {
    serde_json::to_value(ring.spec()).expect("ring spec serializes")
}

pub fn ring_from_json(v: &Value) -> Result<Ring> {
    match v {
        Value::String(s) => Ring::from_notation(s),
        Value::Object(_) => {
            let spec: RingSpec =
                serde_json::from_value(v.clone()).map_err(|e| bad(format!("ring: {e}")))?;
            Ring::new(spec)
        }
        _ => Err(bad("ring must be an object or a notation string")),
    }
}

fn entries_json(m: &RingMatrix) -> Value {
    Value::Array(
        m.to_strings()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(Value::String).collect()))
            .collect(),
    )
}

/// `{"ring", "rows", "cols", "entries"}`.
pub fn matrix_to_json(m: &RingMatrix) -> Value {
    json!({
        "ring": ring_to_json(m.ring()),
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": entries_json(m),
    })
}

fn entries_from_json(ring: &Ring, v: &Value, rows: usize, cols: usize) -> Result<RingMatrix> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("entries must be an array of rows"))?;
    if arr.len() != rows {
        return Err(bad(format!(
            "expected {rows} rows of entries, found {}",
            arr.len()
        )));
    }
    let mut m = RingMatrix::zeros(ring, rows, cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| bad(format!("row {i} must be an array")))?;
        if row.len() != cols {
            return Err(bad(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, e) in row.iter().enumerate() {
            let text = match e {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                _ => {
                    return Err(bad(format!(
                        "entry ({i}, {j}) must be a string or an integer"
                    )))
                }
            };
            let x = ring
                .parse(&text)
                .map_err(|err| bad(format!("entry ({i}, {j}): {err}")))?;
            m.set(i, j, x);
        }
    }
    Ok(m)
}

/// Reads a matrix; `ring` overrides (and must agree with) an embedded ring.
pub fn matrix_from_json(v: &Value, ring: Option<&Ring>) -> Result<RingMatrix> {
    let ring = match (v.get("ring"), ring) {
        (Some(r), Some(given)) => {
            let own = ring_from_json(r)?;
            if own.spec() != given.spec() {
                return Err(Error::RingMismatch(format!(
                    "matrix over {} where {} was expected",
                    own.spec(),
                    given.spec()
                )));
            }
            given.clone()
        }
        (Some(r), None) => ring_from_json(r)?,
        (None, Some(given)) => given.clone(),
        (None, None) => return Err(bad("missing key \"ring\"")),
    };
    let rows = as_usize(v, "rows")?;
    let cols = as_usize(v, "cols")?;
    entries_from_json(&ring, field(v, "entries")?, rows, cols)
}

pub fn module_to_json(d: &DiffModule) -> Value {
    let mut v = matrix_to_json(d.delta());
    if let Some(g) = d.grading() {
        v["generator_degrees"] = json!(g.generator_degrees);
        v["differential_degree"] = json!(g.differential_degree);
    }
    v
}

pub fn module_from_json(v: &Value) -> Result<DiffModule> {
    let delta = matrix_from_json(v, None)?;
    let grading = match (v.get("generator_degrees"), v.get("differential_degree")) {
        (None, None) => None,
        (g, w) => {
            let g = match g {
                Some(g) => as_i64_list(g, "generator_degrees")?,
                None => vec![0; delta.rows()],
            };
            let w = match w {
                Some(w) => w
                    .as_i64()
                    .ok_or_else(|| bad("differential_degree must be an integer"))?,
                None => 0,
            };
            Some(Grading::new(g, w))
        }
    };
    DiffModule::new(delta, grading)
}

pub fn complex_to_json(x: &FreeComplex) -> Value {
    let mut v = json!({
        "ring": ring_to_json(x.ring()),
        "lo": x.lo(),
        "ranks": x.ranks(),
        "differentials": x.differentials().iter().map(entries_json).collect::<Vec<_>>(),
    });
    if let Some(degs) = x.internal_degrees() {
        v["internal_degrees"] = json!(degs);
    }
    v
}

pub fn complex_from_json(v: &Value) -> Result<FreeComplex> {
    let ring = ring_from_json(field(v, "ring")?)?;
    let lo = field(v, "lo")?
        .as_i64()
        .ok_or_else(|| bad("lo must be an integer"))?;
    let ranks: Vec<usize> = as_i64_list(field(v, "ranks")?, "ranks")?
        .into_iter()
        .map(|r| usize::try_from(r).map_err(|_| bad("ranks must be nonnegative")))
        .collect::<Result<_>>()?;
    let diffs = field(v, "differentials")?
        .as_array()
        .ok_or_else(|| bad("differentials must be an array"))?;
    if diffs.len() != ranks.len().saturating_sub(1) {
        return Err(bad(format!(
            "{} terms need {} differentials, found {}",
            ranks.len(),
            ranks.len().saturating_sub(1),
            diffs.len()
        )));
    }
    // differentials[k] is d_{lo+k+1}: X_{lo+k+1} -> X_{lo+k}
    let differentials = diffs
        .iter()
        .enumerate()
        .map(|(k, e)| entries_from_json(&ring, e, ranks[k], ranks[k + 1]))
        .collect::<Result<Vec<_>>>()?;
    let internal = match v.get("internal_degrees") {
        None | Some(Value::Null) => None,
        Some(Value::Array(a)) => Some(
            a.iter()
                .map(|t| as_i64_list(t, "internal_degrees"))
                .collect::<Result<Vec<_>>>()?,
        ),
        Some(_) => return Err(bad("internal_degrees must be an array of arrays")),
    };
    FreeComplex::new(&ring, lo, ranks, differentials, internal)
}

pub fn certificate_to_json(c: &FlagCertificate) -> Value {
    json!({
        "conjugator": c.conjugator.as_ref().map(matrix_to_json),
        "partition": c.partition,
    })
}

pub fn certificate_from_json(v: &Value, ring: &Ring) -> Result<FlagCertificate> {
    let partition: Vec<usize> = as_i64_list(field(v, "partition")?, "partition")?
        .into_iter()
        .map(|r| usize::try_from(r).map_err(|_| bad("partition must be nonnegative")))
        .collect::<Result<_>>()?;
    let conjugator = match v.get("conjugator") {
        None | Some(Value::Null) => None,
        Some(m) => Some(matrix_from_json(m, Some(ring))?),
    };
    FlagCertificate::new(conjugator, partition)
}

/// Re-serializes with object keys in sorted order.
pub fn sorted(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), sorted(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(sorted).collect()),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::koszul_complex;

    #[test]
    fn module_round_trip() {
        let r = Ring::from_notation("Q[x,y,z]/(x^2 + y*z)").unwrap();
        let d = DiffModule::new(
            RingMatrix::parse(&r, &[&["x", "y"], &["z", "-x"]]).unwrap(),
            Some(Grading::flat(2, 1)),
        )
        .unwrap();
        let v = module_to_json(&d);
        assert_eq!(v["entries"][1][1], json!("-x"));
        assert_eq!(module_from_json(&v).unwrap(), d);
    }

    #[test]
    fn integers_and_notation_are_accepted() {
        let v = json!({"ring": "Z/4", "rows": 1, "cols": 1, "entries": [[2]]});
        let d = module_from_json(&v).unwrap();
        assert_eq!(d.ring().modulus(), Some(4));
        let v = json!({"ring": {"kind": "integers"}, "rows": 1, "cols": 2, "entries": [["1", 3]]});
        assert_eq!(matrix_from_json(&v, None).unwrap().cols(), 2);
    }

    #[test]
    fn malformed_matrices() {
        let v = json!({"ring": "Q", "rows": 2, "cols": 1, "entries": [["1"]]});
        assert!(matches!(matrix_from_json(&v, None), Err(Error::Parse(_))));
        let v = json!({"ring": "Q", "rows": 1, "cols": 1, "entries": [[1.5]]});
        assert!(matches!(matrix_from_json(&v, None), Err(Error::Parse(_))));
        let v = json!({"ring": "Q", "rows": 2, "cols": 2, "entries": [["1", "0"], ["0", "0"]]});
        assert!(matches!(
            module_from_json(&v),
            Err(Error::NotSquareZero { .. })
        ));
    }

    #[test]
    fn complex_round_trip() {
        let r = Ring::from_notation("Q[x,y]").unwrap();
        let k = koszul_complex(&r, &[r.var(0), r.var(1)]).unwrap();
        let v = complex_to_json(&k);
        assert_eq!(complex_from_json(&v).unwrap(), k);
    }

    #[test]
    fn sorted_keys() {
        let v = sorted(&json!({"b": 1, "a": {"d": 2, "c": 3}}));
        assert_eq!(v.to_string(), r#"{"a":{"c":3,"d":2},"b":1}"#);
    }
}
