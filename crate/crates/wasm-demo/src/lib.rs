//! Browser demo: threshold explorer, audit explorer and extraction
//! playground. Every export takes plain numbers or strings and returns a
//! JSON document; the native functions are the tested surface.

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use por_core::algebra::{FieldVector, PrimeField};
use por_core::analysis::{threshold, threshold_from, ThresholdParams, ThresholdReport};
use por_core::audit::{audit_decision, omega_from_threshold, AuditSample, Sampling};
use por_core::coding::{rs_code, DEFAULT_CODEWORD_CAP};
use por_core::extractor::{extract, make_prover, succ_exact, ProverSpec};
use por_core::schemes::{Scheme, SchemeKind};

type DemoResult = Result<Value, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn ell_opt(ell: u32) -> Option<usize> {
    (ell > 0).then_some(ell as usize)
}

fn report_json(r: &ThresholdReport) -> Value {
    let omega = omega_from_threshold(r).ok();
    json!({
        "scheme": r.params.kind.as_str(),
        "gamma": r.gamma.to_string(),
        "dstar_formula": r.dstar_formula.to_string(),
        "dstar_exact": r.dstar_exact.as_ref().map(|x| x.to_string()),
        "threshold": r.threshold.to_string(),
        "threshold_f64": r.threshold_f64,
        "source": r.source.as_str(),
        "omega": omega.map(|o| o.omega.to_string()),
        "degenerate": r.degenerate,
    })
}

/// Threshold from closed forms (any size) plus the brute-force response-code
/// distance when the instance is small enough to enumerate.
pub fn threshold_explorer(scheme: &str, q: u64, n: u64, k: u64, d: u64, ell: u32) -> DemoResult {
    let kind: SchemeKind = scheme.parse().map_err(err)?;
    let params = ThresholdParams {
        kind,
        q,
        n,
        k,
        d,
        ell: (ell > 0).then_some(ell as u64),
    };
    let mut out = report_json(&threshold_from(&params, None).map_err(err)?);
    // small Reed-Solomon instances (d = n - k + 1) also get the exact view
    if d == n - k + 1 && q <= 257 && n <= 12 {
        if let Ok(s) = PrimeField::new(q)
            .and_then(|f| rs_code(f, n as usize, k as usize))
            .and_then(|c| Scheme::new(kind, c, ell_opt(ell)))
        {
            if let Ok(r) = threshold(&s, DEFAULT_CODEWORD_CAP) {
                out["exact"] = report_json(&r);
            }
            if let Ok(code) = s.response_code() {
                out["dstar_bruteforce"] = json!(code.dstar());
            }
        }
    }
    Ok(out)
}

/// Evaluates an audit outcome of `g` correct answers out of `t`.
pub fn audit_explorer(sampling: &str, gamma: u64, omega: u64, t: u64, g: u64, alpha: f64) -> DemoResult {
    let sampling: Sampling = sampling.parse().map_err(err)?;
    let sample = AuditSample {
        t,
        g,
        sampling,
        gamma: gamma as u128,
        omega: omega as u128,
    };
    let r = audit_decision(&sample, alpha).map_err(err)?;
    Ok(json!({
        "p0": sample.p0(),
        "p_value": r.p_value,
        "decision": r.decision.as_str(),
        "theta_l": r.theta_l,
        "confidence": r.confidence_level,
        "rules_agree": r.rules_agree(),
        "advice": r.advice,
    }))
}

/// Encodes `message` with RS(n, k) over F_q, runs a prover model on it and
/// extracts. `message` is a whitespace or comma separated list of k values.
pub fn extraction_playground(
    scheme: &str,
    q: u64,
    n: u32,
    k: u32,
    ell: u32,
    message: &str,
    prover: &str,
) -> DemoResult {
    let kind: SchemeKind = scheme.parse().map_err(err)?;
    if kind == SchemeKind::ShachamWaters {
        return Err("the playground covers the keyless schemes".into());
    }
    let field = PrimeField::new(q).map_err(err)?;
    let code = rs_code(field, n as usize, k as usize).map_err(err)?;
    let values = message
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("'{s}' is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    let m = FieldVector::from_canonical(field, values).map_err(err)?;
    let encoded = code.encode(&m).map_err(err)?;
    let s = Scheme::new(kind, code, ell_opt(ell)).map_err(err)?;
    let spec: ProverSpec = prover.parse().map_err(err)?;

    let mut p = make_prover(&spec, &s, &encoded, None, None).map_err(err)?;
    let succ = succ_exact(&mut p, &s, &encoded).map_err(err)?;
    let report = threshold(&s, DEFAULT_CODEWORD_CAP).map_err(err)?;
    let mut p = make_prover(&spec, &s, &encoded, None, None).map_err(err)?;
    let result = extract(&mut p, &s).map_err(err)?;
    Ok(json!({
        "codeword": encoded.blocks().values(),
        "succ": succ.to_string(),
        "succ_f64": succ.to_f64(),
        "threshold": report.threshold.to_string(),
        "threshold_f64": report.threshold_f64,
        "guaranteed": report.guarantees(&succ),
        "m_hat": result.m_hat.values(),
        "recovered": result.m_hat == m,
        "distance": result.distance,
        "tie": result.tie,
        "queries": result.queries,
    }))
}

fn to_js(r: DemoResult) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = thresholdExplorer)]
pub fn threshold_explorer_js(scheme: &str, q: u64, n: u64, k: u64, d: u64, ell: u32) -> Result<String, JsError> {
    to_js(threshold_explorer(scheme, q, n, k, d, ell))
}

#[wasm_bindgen(js_name = auditExplorer)]
pub fn audit_explorer_js(sampling: &str, gamma: u64, omega: u64, t: u64, g: u64, alpha: f64) -> Result<String, JsError> {
    to_js(audit_explorer(sampling, gamma, omega, t, g, alpha))
}

#[wasm_bindgen(js_name = extractionPlayground)]
pub fn extraction_playground_js(
    scheme: &str,
    q: u64,
    n: u32,
    k: u32,
    ell: u32,
    message: &str,
    prover: &str,
) -> Result<String, JsError> {
    to_js(extraction_playground(scheme, q, n, k, ell, message, prover))
}
