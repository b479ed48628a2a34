//! Deterministic JSON serialization for every report the CLI emits.
//! Polynomials: {"vars": ["t"] or ["t","M"], "terms": [[exp(s)..., "coeff"]]}
//! with terms in ascending exponent order and coefficients as decimal
//! strings, so files round-trip bit-exactly and diff cleanly.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::apoly::AJReport;
use crate::laurent::{LaurentPoly1, LaurentPoly2};
use crate::probes::{DegreeSweepRow, MMProbeResult};
use crate::qtorus::{CommutativeMLPoly, QTorusOperator};
use crate::recurrence::{AnnihilatorCertificate, InhomogeneousFit, VerifyReport};

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("malformed {0} JSON: {1}")]
    Malformed(&'static str, String),
}

fn bad(what: &'static str, why: impl ToString) -> SerialError {
    SerialError::Malformed(what, why.to_string())
}

pub fn poly1_to_json(p: &LaurentPoly1) -> Value {
    poly1_to_json_var(p, "t")
}

/// Same layout with a different variable label (witnesses live in M).
pub fn poly1_to_json_var(p: &LaurentPoly1, var: &str) -> Value {
    let terms: Vec<Value> = p.iter().map(|(e, c)| json!([e, c.to_string()])).collect();
    json!({"vars": [var], "terms": terms})
}

pub fn poly1_from_json(v: &Value) -> Result<LaurentPoly1, SerialError> {
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("polynomial", "missing terms"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let pair = t.as_array().filter(|a| a.len() == 2);
        let (e, c) = match pair {
            Some(a) => (a[0].as_i64(), a[1].as_str()),
            None => (None, None),
        };
        let e = e.ok_or_else(|| bad("polynomial", "exponent"))?;
        let c: BigInt = c
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("polynomial", "coefficient"))?;
        out.push((e, c));
    }
    Ok(LaurentPoly1::from_terms(out))
}

pub fn poly2_to_json(p: &LaurentPoly2) -> Value {
    let terms: Vec<Value> = p
        .iter()
        .map(|((i, j), c)| json!([i, j, c.to_string()]))
        .collect();
    json!({"vars": ["t", "M"], "terms": terms})
}

pub fn poly2_from_json(v: &Value) -> Result<LaurentPoly2, SerialError> {
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("polynomial", "missing terms"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let trip = t.as_array().filter(|a| a.len() == 3);
        let (i, j, c) = match trip {
            Some(a) => (a[0].as_i64(), a[1].as_i64(), a[2].as_str()),
            None => (None, None, None),
        };
        let i = i.ok_or_else(|| bad("polynomial", "t-exponent"))?;
        let j = j.ok_or_else(|| bad("polynomial", "M-exponent"))?;
        let c: BigInt = c
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("polynomial", "coefficient"))?;
        out.push((i, j, c));
    }
    Ok(LaurentPoly2::from_terms(out))
}

pub fn operator_to_json(op: &QTorusOperator) -> Value {
    let coeffs: Vec<Value> = op
        .iter()
        .map(|(k, a)| json!([k, poly2_to_json(a)]))
        .collect();
    json!({"op": coeffs})
}

pub fn operator_from_json(v: &Value) -> Result<QTorusOperator, SerialError> {
    let coeffs = v
        .get("op")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("operator", "missing op"))?;
    let mut out = QTorusOperator::zero();
    for c in coeffs {
        let pair = c.as_array().filter(|a| a.len() == 2);
        let (k, a) = match pair {
            Some(arr) => (arr[0].as_i64(), Some(&arr[1])),
            None => (None, None),
        };
        let k = k.ok_or_else(|| bad("operator", "L-exponent"))?;
        out.add_coeff(k, poly2_from_json(a.unwrap())?);
    }
    Ok(out)
}

/// Commutative (L, M)-polynomials carry rational coefficients; serialized as
/// "num" or "num/den" strings per M-term.
pub fn ml_to_json(p: &CommutativeMLPoly) -> Value {
    let coeffs: Vec<Value> = p
        .iter()
        .map(|(l, c)| {
            let terms: Vec<Value> = c
                .iter()
                .map(|(e, q)| {
                    let s = if q.is_integer() {
                        q.numer().to_string()
                    } else {
                        format!("{}/{}", q.numer(), q.denom())
                    };
                    json!([e, s])
                })
                .collect();
            json!([l, {"vars": ["M"], "terms": terms}])
        })
        .collect();
    json!({"lpoly": coeffs})
}

pub fn fit_to_json(fit: &InhomogeneousFit) -> Value {
    json!({
        "rho": poly2_to_json(&fit.rho),
        "den": poly1_to_json(&fit.den),
        "window": [fit.window.0, fit.window.1],
        "samples_used": fit.samples_used,
        "verified_on": fit.verified_on,
    })
}

pub fn certificate_to_json(cert: &AnnihilatorCertificate, pass: bool) -> Value {
    json!({
        "r": cert.r,
        "m": cert.m,
        "S": operator_to_json(&cert.operator),
        "checked": cert.checked_range,
        "result": if pass { "pass" } else { "fail" },
    })
}

pub fn aj_report_to_json(rep: &AJReport) -> Value {
    let witness = match &rep.witness {
        Some(w) => json!({
            "num": poly1_to_json_var(w.num(), "M"),
            "den": poly1_to_json_var(w.den(), "M"),
        }),
        None => Value::Null,
    };
    let failures: Vec<Value> = rep.failures.iter().map(|(i, j)| json!([i, j])).collect();
    json!({
        "r": rep.r,
        "proportional": rep.proportional,
        "witness": witness,
        "epsilon_S": ml_to_json(&rep.epsilon_s),
        "a_poly": ml_to_json(&rep.a_poly),
        "failures": failures,
        "annihilation_checked": rep.annihilation_checked,
    })
}

pub fn verify_report_to_json(name: &str, rep: &VerifyReport) -> Value {
    json!({
        "suite": name,
        "checked": rep.checked,
        "failures": rep.failures,
        "pass": rep.all_zero(),
    })
}

pub fn mm_probe_to_json(res: &MMProbeResult) -> Value {
    let samples: Vec<Value> = res
        .samples
        .iter()
        .map(|s| {
            json!({
                "n": s.n,
                "value": [s.value.re, s.value.im],
                "abs_error": s.abs_error,
            })
        })
        .collect();
    json!({
        "z": [res.z.re, res.z.im],
        "target": [res.target.re, res.target.im],
        "samples": samples,
        "convention": "J_E(n)/[n] evaluated at u = t^4 = z^(1/n), principal root",
        "tolerance_note": "0.05-at-n=40 is an artifact choice, not from the source material",
    })
}

pub fn sweep_to_csv(rows: &[DegreeSweepRow]) -> String {
    let mut out =
        String::from("r,n,dplus_computed,dplus_oracle,dminus_computed,dminus_oracle,match\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.r,
            row.n,
            row.dplus_computed,
            row.dplus_oracle,
            row.dminus_computed,
            row.dminus_oracle,
            row.matches
        ));
    }
    out
}

/// Witness-free human form: "t^-2 + 3 - t^2" style, used for terse stdout.
pub fn poly1_display(p: &LaurentPoly1) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (e, c)) in p.iter().enumerate() {
        let neg = num_traits::Signed::is_negative(c);
        let mag = num_traits::Signed::abs(c);
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff_one = num_traits::One::is_one(&mag);
        match (*e, coeff_one) {
            (0, _) => out.push_str(&mag.to_string()),
            (1, true) => out.push('t'),
            (1, false) => out.push_str(&format!("{mag}*t")),
            (_, true) => out.push_str(&format!("t^{e}")),
            (_, false) => out.push_str(&format!("{mag}*t^{e}")),
        }
    }
    out
}

/// Stable JSON text: serde_json preserves insertion order of json! maps only
/// with the preserve_order feature; sort keys instead so identical reports
/// are byte-identical.
pub fn to_stable_string(v: &Value) -> String {
    fn sort(v: &Value) -> Value {
        match v {
            Value::Object(m) => {
                let mut out = Map::new();
                let mut keys: Vec<&String> = m.keys().collect();
                keys.sort();
                for k in keys {
                    out.insert(k.clone(), sort(&m[k]));
                }
                Value::Object(out)
            }
            Value::Array(a) => Value::Array(a.iter().map(sort).collect()),
            other => other.clone(),
        }
    }
    let mut s = serde_json::to_string_pretty(&sort(v)).expect("valid JSON");
    s.push('\n');
    s
}
