//! The JSON network file format.
//!
//! ```json
//! { "variables": [ {"name": "F", "values": ["f", "fc"]} ],
//!   "edges": [ ["F", "L"] ],
//!   "local": { "F": {"type": "interval", "rows": {"": {"lower": [0.4, 0.5], "upper": [0.5, 0.6]}}} },
//!   "irrelevance": "nondescendants" }
//! ```
//!
//! Numbers are decimals or `"p/q"` strings and are read exactly. The
//! canonical serialization sorts object keys, writes terminating decimals as
//! JSON numbers and everything else as fractions.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

use super::{LocalKind, LocalRecord, LocalRow, NetworkDocument, NetworkModel, RawLocal, RawPolicy, Variable};
use crate::error::{Error, Result};
use crate::model::IrrelevancePolicy;
use crate::scalar::{fraction_string, parse_rational, terminating_decimal, Rational};

fn syntax(path: &str, message: impl Into<String>) -> Error {
    Error::Syntax {
        position: if path.is_empty() { "/".into() } else { path.to_string() },
        message: message.into(),
    }
}

/// Decodes a network file without checking any model invariant.
pub fn parse_document(text: &str) -> Result<NetworkDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        position: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let obj = root.as_object().ok_or_else(|| syntax("", "expected an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "variables" | "edges" | "local" | "irrelevance") {
            return Err(syntax(&format!("/{key}"), "unknown field"));
        }
    }

    let variables = array(obj.get("variables"), "/variables")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let path = format!("/variables/{i}");
            let o = v.as_object().ok_or_else(|| syntax(&path, "expected an object"))?;
            let name = string(o.get("name"), &format!("{path}/name"))?;
            let values = array(o.get("values"), &format!("{path}/values"))?
                .iter()
                .enumerate()
                .map(|(j, x)| string(Some(x), &format!("{path}/values/{j}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(Variable { name, values })
        })
        .collect::<Result<Vec<_>>>()?;

    let edges = match obj.get("edges") {
        None => Vec::new(),
        edges => array(edges, "/edges")?
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let path = format!("/edges/{i}");
                let pair = array(Some(e), &path)?;
                if pair.len() != 2 {
                    return Err(syntax(&path, "an edge is a [parent, child] pair"));
                }
                Ok((
                    string(Some(&pair[0]), &format!("{path}/0"))?,
                    string(Some(&pair[1]), &format!("{path}/1"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
    };

    let local_obj = obj
        .get("local")
        .ok_or_else(|| syntax("/local", "missing field"))?
        .as_object()
        .ok_or_else(|| syntax("/local", "expected an object"))?;
    let mut local = Vec::with_capacity(local_obj.len());
    for (name, spec) in local_obj {
        let path = format!("/local/{name}");
        local.push((name.clone(), decode_local(spec, &path)?));
    }

    let irrelevance = match obj.get("irrelevance") {
        None => RawPolicy::None,
        Some(Value::String(s)) if s == "none" => RawPolicy::None,
        Some(Value::String(s)) if s == "nondescendants" => RawPolicy::Nondescendants,
        Some(Value::Array(items)) => RawPolicy::Explicit(
            items
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let path = format!("/irrelevance/{i}");
                    let o = d.as_object().ok_or_else(|| syntax(&path, "expected an object"))?;
                    let target = string(o.get("target"), &format!("{path}/target"))?;
                    let irrelevant = array(o.get("irrelevant"), &format!("{path}/irrelevant"))?
                        .iter()
                        .enumerate()
                        .map(|(j, x)| string(Some(x), &format!("{path}/irrelevant/{j}")))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((target, irrelevant))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        Some(_) => {
            return Err(syntax(
                "/irrelevance",
                "expected \"none\", \"nondescendants\" or a list of declarations",
            ))
        }
    };

    Ok(NetworkDocument {
        variables,
        edges,
        local,
        irrelevance,
    })
}

fn decode_local(spec: &Value, path: &str) -> Result<RawLocal> {
    let o = spec.as_object().ok_or_else(|| syntax(path, "expected an object"))?;
    let kind = match string(o.get("type"), &format!("{path}/type"))?.as_str() {
        "point" => LocalKind::Point,
        "vertices" => LocalKind::Vertices,
        "interval" => LocalKind::Interval,
        "constraints" => LocalKind::Constraints,
        other => return Err(syntax(&format!("{path}/type"), format!("unknown local type `{other}`"))),
    };
    let rows_obj = o
        .get("rows")
        .ok_or_else(|| syntax(&format!("{path}/rows"), "missing field"))?
        .as_object()
        .ok_or_else(|| syntax(&format!("{path}/rows"), "expected an object"))?;
    let mut rows = Vec::with_capacity(rows_obj.len());
    for (key, value) in rows_obj {
        let rpath = format!("{path}/rows/{key}");
        let record = match kind {
            LocalKind::Point => LocalRecord::Point(numbers(value, &rpath)?),
            LocalKind::Vertices => LocalRecord::Vertices(
                array(Some(value), &rpath)?
                    .iter()
                    .enumerate()
                    .map(|(i, v)| numbers(v, &format!("{rpath}/{i}")))
                    .collect::<Result<Vec<_>>>()?,
            ),
            LocalKind::Interval => {
                let io = value.as_object().ok_or_else(|| syntax(&rpath, "expected {lower, upper}"))?;
                let lower = numbers(
                    io.get("lower").ok_or_else(|| syntax(&rpath, "missing `lower`"))?,
                    &format!("{rpath}/lower"),
                )?;
                let upper = numbers(
                    io.get("upper").ok_or_else(|| syntax(&rpath, "missing `upper`"))?,
                    &format!("{rpath}/upper"),
                )?;
                LocalRecord::Interval { lower, upper }
            }
            LocalKind::Constraints => {
                let mut out = Vec::new();
                for (i, row) in array(Some(value), &rpath)?.iter().enumerate() {
                    out.extend(decode_constraint(row, &format!("{rpath}/{i}"))?);
                }
                LocalRecord::Constraints(out)
            }
        };
        rows.push((key.clone(), record));
    }
    Ok(RawLocal { kind, rows })
}

/// `≥` rows are negated and equalities split into two `≤` rows.
fn decode_constraint(row: &Value, path: &str) -> Result<Vec<LocalRow>> {
    let o = row.as_object().ok_or_else(|| syntax(path, "expected {coefficients, relation, bound}"))?;
    let coefficients = numbers(
        o.get("coefficients").ok_or_else(|| syntax(path, "missing `coefficients`"))?,
        &format!("{path}/coefficients"),
    )?;
    let bound = number(
        o.get("bound").ok_or_else(|| syntax(path, "missing `bound`"))?,
        &format!("{path}/bound"),
    )?;
    let relation = match o.get("relation") {
        None => "<=".to_string(),
        rel => string(rel, &format!("{path}/relation"))?,
    };
    let le = LocalRow {
        coefficients: coefficients.clone(),
        bound: bound.clone(),
    };
    let ge = LocalRow {
        coefficients: coefficients.iter().map(|c| -c).collect(),
        bound: -bound,
    };
    match relation.as_str() {
        "<=" => Ok(vec![le]),
        ">=" => Ok(vec![ge]),
        "=" | "==" => Ok(vec![le, ge]),
        other => Err(syntax(&format!("{path}/relation"), format!("unknown relation `{other}`"))),
    }
}

fn array<'a>(v: Option<&'a Value>, path: &str) -> Result<&'a Vec<Value>> {
    match v {
        Some(Value::Array(a)) => Ok(a),
        Some(_) => Err(syntax(path, "expected an array")),
        None => Err(syntax(path, "missing field")),
    }
}

fn string(v: Option<&Value>, path: &str) -> Result<String> {
    match v {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(syntax(path, "expected a string")),
        None => Err(syntax(path, "missing field")),
    }
}

fn number(v: &Value, path: &str) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(syntax(path, "expected a number or \"p/q\" string")),
    };
    parse_rational(&text).ok_or_else(|| syntax(path, format!("invalid number `{text}`")))
}

fn numbers(v: &Value, path: &str) -> Result<Vec<Rational>> {
    array(Some(v), path)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}/{i}")))
        .collect()
}

fn number_value(r: &Rational) -> Value {
    match terminating_decimal(r) {
        Some(dec) => Value::Number(Number::from_str(&dec).expect("decimal literal")),
        None => Value::String(fraction_string(r)),
    }
}

fn numbers_value(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(number_value).collect())
}

/// Canonical text of a model; `parse_network(&serialize(m)) == m`.
pub fn serialize(model: &NetworkModel) -> String {
    let mut root = Map::new();
    root.insert(
        "variables".into(),
        Value::Array(
            model
                .variables()
                .iter()
                .map(|v| {
                    let mut o = Map::new();
                    o.insert("name".into(), Value::String(v.name.clone()));
                    o.insert(
                        "values".into(),
                        Value::Array(v.values.iter().cloned().map(Value::String).collect()),
                    );
                    Value::Object(o)
                })
                .collect(),
        ),
    );
    let dag = model.dag();
    root.insert(
        "edges".into(),
        Value::Array(
            dag.edges()
                .iter()
                .map(|&(p, c)| {
                    Value::Array(vec![
                        Value::String(dag.name(p).to_string()),
                        Value::String(dag.name(c).to_string()),
                    ])
                })
                .collect(),
        ),
    );
    let mut local = Map::new();
    for node in 0..model.len() {
        let spec = model.local(node);
        let kind = spec.records[0].kind();
        debug_assert!(spec.records.iter().all(|r| r.kind() == kind), "mixed record kinds");
        let mut rows = Map::new();
        for (k, record) in spec.records.iter().enumerate() {
            let value = match record {
                LocalRecord::Point(p) => numbers_value(p),
                LocalRecord::Vertices(vs) => Value::Array(vs.iter().map(|v| numbers_value(v)).collect()),
                LocalRecord::Interval { lower, upper } => {
                    let mut o = Map::new();
                    o.insert("lower".into(), numbers_value(lower));
                    o.insert("upper".into(), numbers_value(upper));
                    Value::Object(o)
                }
                LocalRecord::Constraints(cs) => Value::Array(
                    cs.iter()
                        .map(|r| {
                            let mut o = Map::new();
                            o.insert("coefficients".into(), numbers_value(&r.coefficients));
                            o.insert("relation".into(), Value::String("<=".into()));
                            o.insert("bound".into(), number_value(&r.bound));
                            Value::Object(o)
                        })
                        .collect(),
                ),
            };
            rows.insert(model.config_label(node, k), value);
        }
        let mut o = Map::new();
        o.insert("type".into(), Value::String(kind.as_str().into()));
        o.insert("rows".into(), Value::Object(rows));
        local.insert(model.variable(node).name.clone(), Value::Object(o));
    }
    root.insert("local".into(), Value::Object(local));
    let policy = match model.policy() {
        IrrelevancePolicy::None => Value::String("none".into()),
        IrrelevancePolicy::Nondescendants => Value::String("nondescendants".into()),
        IrrelevancePolicy::Explicit(decls) => Value::Array(
            decls
                .iter()
                .map(|d| {
                    let mut o = Map::new();
                    o.insert("target".into(), Value::String(dag.name(d.target).to_string()));
                    o.insert(
                        "irrelevant".into(),
                        Value::Array(
                            d.irrelevant
                                .iter()
                                .map(|&w| Value::String(dag.name(w).to_string()))
                                .collect(),
                        ),
                    );
                    Value::Object(o)
                })
                .collect(),
        ),
    };
    root.insert("irrelevance".into(), policy);
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
    text.push('\n');
    text
}
