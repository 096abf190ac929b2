//! Machine-readable reports (`qtype-report/1`).
//!
//! Exact coefficients are emitted as `{"a": …, "b": …, "k": …}` meaning
//! `(a + b·√2)/2^k`; inexact ones as `{"approx": f64}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::infer::Verdict;
use crate::measure::MeasurementOutcome;
use crate::pauli::PauliString;
use crate::ring::{Coeff, RingCoeff};
use crate::sum::AdditiveOperator;
use crate::types::{Branch, QType};

pub const SCHEMA: &str = "qtype-report/1";

/// Overall status; maps onto process exit codes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Pass,
    Fail,
    Error,
    Unsupported,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
            Status::Unsupported => 3,
        }
    }
}

/// One analysis result. Absent optional fields are omitted from the JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub verdict: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inferred: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Value>,
    /// Type after every statement, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Value>>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tbound: Option<u32>,
    /// Measurement outcomes with their probabilities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Value>,
    /// Command-specific payload (synthesized circuit, oracle summary, …).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
}

impl Report {
    pub fn new(command: &str, verdict: Status) -> Self {
        Report { schema: SCHEMA.to_string(), command: command.to_string(), verdict, ..Report::default() }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Integers beyond the `i64` range are emitted as decimal strings.
fn int_json(v: i128) -> Value {
    i64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::from(v.to_string()))
}

pub fn coeff_json(c: &Coeff) -> Value {
    match c {
        Coeff::Exact(r) => json!({ "a": int_json(r.a()), "b": int_json(r.b()), "k": r.k() }),
        Coeff::Approx(v) => json!({ "approx": v }),
    }
}

pub fn operator_json(m: &AdditiveOperator) -> Value {
    json!({
        "text": m.to_string(),
        "terms": m.iter().map(|(w, c)| json!({ "word": w.to_string(), "coeff": coeff_json(c) })).collect::<Vec<_>>(),
    })
}

pub fn branch_json(b: &Branch) -> Value {
    json!({
        "text": b.to_string(),
        "terms": b.terms().iter().map(operator_json).collect::<Vec<_>>(),
        "partitions": b.partitions().iter().map(|p| p.iter().map(|q| q + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn type_json(t: &QType) -> Value {
    json!({
        "text": t.to_string(),
        "qubits": t.num_qubits(),
        "branches": t.branches().iter().map(branch_json).collect::<Vec<_>>(),
    })
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "pass": v.pass,
        "inferred": type_json(&v.inferred),
        "claimed": type_json(&v.claimed),
        "diff": v.diff,
    })
}

pub fn outcome_json(m: &MeasurementOutcome) -> Value {
    json!({
        "qubit": m.qubit + 1,
        "outcomes": m.branches.iter().map(|o| json!({
            "sign": if o.sign > 0 { "+" } else { "-" },
            "branch": branch_json(&o.branch),
            "probability": o.probability.as_ref().map(coeff_json),
        })).collect::<Vec<_>>(),
    })
}

fn bad(what: &str) -> Error {
    Error::Invalid(format!("malformed report JSON: {what}"))
}

fn int_from_json(v: &Value) -> Result<i128> {
    match v {
        Value::Number(n) => n.as_i64().map(i128::from).ok_or_else(|| bad("non-integer coefficient")),
        Value::String(s) => s.parse().map_err(|_| bad("non-integer coefficient")),
        _ => Err(bad("coefficient component")),
    }
}

pub fn coeff_from_json(v: &Value) -> Result<Coeff> {
    if let Some(x) = v.get("approx") {
        return x.as_f64().map(Coeff::Approx).ok_or_else(|| bad("approx"));
    }
    let a = int_from_json(v.get("a").ok_or_else(|| bad("missing a"))?)?;
    let b = int_from_json(v.get("b").ok_or_else(|| bad("missing b"))?)?;
    let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| bad("missing k"))?;
    Ok(Coeff::Exact(RingCoeff::new(a, b, u32::try_from(k).map_err(|_| bad("k"))?)))
}

fn operator_from_json(v: &Value, n: usize) -> Result<AdditiveOperator> {
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("operator terms"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let w = t.get("word").and_then(Value::as_str).ok_or_else(|| bad("word"))?;
        let p: PauliString = w.parse()?;
        if p.num_qubits() != n || p.phase() != 0 {
            return Err(bad("word width or phase"));
        }
        out.push((p.into_word(), coeff_from_json(t.get("coeff").ok_or_else(|| bad("coeff"))?)?));
    }
    Ok(AdditiveOperator::from_terms(n, out))
}

/// Inverse of [`type_json`]: rebuilds the exact type value.
pub fn type_from_json(v: &Value) -> Result<QType> {
    let n = v.get("qubits").and_then(Value::as_u64).ok_or_else(|| bad("qubits"))? as usize;
    let branches = v.get("branches").and_then(Value::as_array).ok_or_else(|| bad("branches"))?;
    let mut out = Vec::with_capacity(branches.len());
    for b in branches {
        let terms = b.get("terms").and_then(Value::as_array).ok_or_else(|| bad("branch terms"))?;
        let terms = terms.iter().map(|t| operator_from_json(t, n)).collect::<Result<Vec<_>>>()?;
        let parts = match b.get("partitions").and_then(Value::as_array) {
            None => Vec::new(),
            Some(ps) => ps
                .iter()
                .map(|p| {
                    p.as_array()
                        .ok_or_else(|| bad("partition"))?
                        .iter()
                        .map(|q| match q.as_u64() {
                            Some(q) if q >= 1 && (q as usize) <= n => Ok(q as usize - 1),
                            _ => Err(bad("partition wire")),
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        };
        out.push(Branch::new(n, terms).with_partitions(parts));
    }
    QType::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_encoding() {
        let c = Coeff::Exact(RingCoeff::new(2, 1, 2));
        assert_eq!(coeff_json(&c), json!({"a": 2, "b": 1, "k": 2}));
        assert_eq!(coeff_json(&Coeff::Approx(0.25)), json!({"approx": 0.25}));
    }

    #[test]
    fn report_round_trip() {
        let t = crate::syntax::parse_type("(rt2/2)(X + Z)").unwrap();
        let r = Report { inferred: Some(type_json(&t)), ..Report::new("normalize", Status::Pass) };
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.schema, SCHEMA);
        let inferred = back.inferred.unwrap();
        assert_eq!(inferred["branches"][0]["terms"][0]["terms"][0]["coeff"], json!({"a": 0, "b": 1, "k": 1}));
        assert_eq!(type_from_json(&inferred).unwrap(), t);
        assert!(!r.to_json().contains("tbound"));
    }
}
