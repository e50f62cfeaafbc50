//! JSON encoding of exact values. Polynomials carry a readable `text` form
//! and a `terms` list of `{exponents, num, den}` over the declared variables.

use std::sync::Arc;

use irrvec::frames::VectorField;
use irrvec::ring::{Exponents, VarTable};
use irrvec::solver::IrregularSeries;
use irrvec::virasoro::{ModuleVector, Partition};
use irrvec::{Poly, RatFunc, Rational, Series};
use serde_json::{json, Map, Value};

pub fn rational(q: &Rational) -> Value {
    json!(q.to_string())
}

pub fn poly(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(e, c)| json!({"exponents": e.to_vec(), "num": c.numer().to_string(), "den": c.denom().to_string()}))
        .collect();
    json!({"text": p.to_string(), "terms": terms})
}

pub fn ratfunc(f: &RatFunc) -> Value {
    json!({"num": poly(f.numerator()), "den": poly(f.denominator())})
}

pub fn polys<'a>(ps: impl IntoIterator<Item = &'a Poly>) -> Value {
    Value::Array(ps.into_iter().map(poly).collect())
}

pub fn matrix(m: &[Vec<Poly>]) -> Value {
    Value::Array(m.iter().map(polys).collect())
}

pub fn variables(table: &VarTable) -> Value {
    Value::Array((0..table.len()).map(|i| json!({"name": table.name(i), "weight": table.weight(i)})).collect())
}

pub fn field(table: &VarTable, f: &VectorField) -> Value {
    let mut m = Map::new();
    for (&x, c) in f.components() {
        m.insert(table.name(x).to_string(), poly(c));
    }
    Value::Object(m)
}

pub fn series(s: &Series) -> Value {
    let coeffs: Vec<Value> = s.iter().map(|(k, c)| json!({"order": k, "coeff": poly(c)})).collect();
    json!({"variable": s.var_name(), "known_through": s.high(), "text": s.to_string(), "coeffs": coeffs})
}

pub fn module_vector<C>(v: &ModuleVector<C>, coeff: impl Fn(&C) -> Value) -> Value
where
    C: irrvec::ring::Coefficient,
{
    let mut m = Map::new();
    for (lambda, c) in v.terms() {
        m.insert(lambda.to_string(), coeff(c));
    }
    Value::Object(m)
}

pub fn irregular_series(s: &IrregularSeries) -> Value {
    let tail: Vec<Value> =
        s.tail.iter().enumerate().map(|(k, v)| json!({"k": k, "terms": module_vector(v, poly)})).collect();
    let unknowns: Vec<Value> = s
        .ledger
        .entries
        .iter()
        .map(|e| match &e.status {
            irrvec::solver::UnknownStatus::Pending => json!({"name": e.name, "status": "pending"}),
            irrvec::solver::UnknownStatus::Solved { order, value } => {
                json!({"name": e.name, "status": "solved", "order": order, "value": poly(value)})
            }
        })
        .collect();
    let mut out = json!({
        "expansion_variable": s.symbols.table().name(s.symbols.expansion_idx()),
        "nu": poly(&s.nu),
        "g": polys(&s.g),
        "tail": tail,
        "unknowns": unknowns,
    });
    if let Some(g) = &s.gauge {
        out["gauge"] = json!({"g0": poly(&g.g0), "log_exponents": polys(&g.log_exponents)});
    }
    out
}

#[derive(Debug, thiserror::Error)]
#[error("malformed input at {path}: {reason}")]
pub struct DecodeError {
    pub path: String,
    pub reason: String,
}

fn bad(path: &str, reason: impl Into<String>) -> DecodeError {
    DecodeError { path: path.into(), reason: reason.into() }
}

pub fn field_at<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, DecodeError> {
    v.get(key).ok_or_else(|| bad(path, format!("missing {key:?}")))
}

pub fn decode_poly(table: &Arc<VarTable>, v: &Value, path: &str) -> Result<Poly, DecodeError> {
    let terms = field_at(v, "terms", path)?.as_array().ok_or_else(|| bad(path, "terms is not a list"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let exps = field_at(t, "exponents", path)?.as_array().ok_or_else(|| bad(path, "exponents is not a list"))?;
        if exps.len() != table.len() {
            return Err(bad(path, format!("expected {} exponents, got {}", table.len(), exps.len())));
        }
        let exps: Exponents = exps
            .iter()
            .map(|e| e.as_i64().and_then(|e| i16::try_from(e).ok()).ok_or_else(|| bad(path, "exponent out of range")))
            .collect::<Result<_, _>>()?;
        let num = field_at(t, "num", path)?.as_str().ok_or_else(|| bad(path, "num is not a string"))?;
        let den = field_at(t, "den", path)?.as_str().ok_or_else(|| bad(path, "den is not a string"))?;
        let c: Rational = format!("{num}/{den}").parse().map_err(|_| bad(path, format!("bad rational {num}/{den}")))?;
        out.push((exps, c));
    }
    Ok(Poly::from_terms(table, out))
}

pub fn decode_partition(src: &str, path: &str) -> Result<Partition, DecodeError> {
    let inner = src.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(|| bad(path, format!("bad partition {src:?}")))?;
    if inner.trim().is_empty() {
        return Ok(Partition::empty());
    }
    let parts: Vec<u16> = inner
        .split(',')
        .map(|p| p.trim().parse::<u16>().ok().filter(|&p| p > 0).ok_or_else(|| bad(path, format!("bad partition {src:?}"))))
        .collect::<Result<_, _>>()?;
    if parts.windows(2).any(|w| w[0] < w[1]) {
        return Err(bad(path, format!("partition {src:?} is not weakly decreasing")));
    }
    Ok(Partition::new(parts))
}
