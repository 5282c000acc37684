//! Machine-readable report envelopes: JSON documents and CSV tables.
//!
//! Every report carries the tool name, version, command and the flags that
//! produced it. CSV output starts with one `# {json}` line holding the same
//! header object, followed by a column row and one row per result. Floats in
//! CSV are written with 17 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::paving::ExperimentRecord;
use crate::weaver::CertificateReport;

pub const TOOL: &str = "paving";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The header object shared by JSON and CSV output.
pub fn header(command: &str, flags: Value) -> Value {
    serde_json::json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "flags": flags,
    })
}

/// `header` with `body`'s fields merged in, pretty-printed with a trailing newline.
pub fn json_document<T: Serialize>(header: &Value, body: &T) -> serde_json::Result<String> {
    let mut doc = header.clone();
    if let (Value::Object(dst), Value::Object(src)) = (&mut doc, serde_json::to_value(body)?) {
        dst.extend(src);
    }
    let mut out = serde_json::to_string_pretty(&doc)?;
    out.push('\n');
    Ok(out)
}

/// 17 significant digits; empty for absent or non-finite values.
pub fn fmt_float(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => String::new(),
    }
}

fn signs_string(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn csv_document(header: &Value, columns: &[&str], rows: Vec<Vec<String>>) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
        .expect("csv writer emits utf-8");
    Ok(format!("# {header}\n{body}"))
}

pub const RECORD_COLUMNS: &[&str] = &[
    "seed",
    "n",
    "rank",
    "delta_p",
    "two_delta_p",
    "min_psp_norm",
    "conjecture_a_satisfied",
    "argmin_signs",
    "theorem1_max_norm",
    "theorem1_bound",
    "runtime_ms",
    "error",
];

pub fn records_csv(header: &Value, records: &[ExperimentRecord]) -> csv::Result<String> {
    let rows = records
        .iter()
        .map(|r| {
            let t1_max = r.theorem1_norms.as_ref().map(|v| {
                v.iter().flatten().copied().fold(0.0, f64::max)
            });
            vec![
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                r.n.to_string(),
                r.rank.to_string(),
                fmt_float(Some(r.delta_p)),
                fmt_float(Some(r.two_delta_p)),
                fmt_float(r.min_psp_norm),
                r.conjecture_a_satisfied.map(|b| b.to_string()).unwrap_or_default(),
                r.argmin_signs.as_ref().map(|s| signs_string(s.signs())).unwrap_or_default(),
                fmt_float(t1_max),
                fmt_float(r.theorem1_bound),
                r.runtime_ms.map(|t| t.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    csv_document(header, RECORD_COLUMNS, rows)
}

pub const CERTIFICATE_COLUMNS: &[&str] = &[
    "m",
    "dimension",
    "delta_p",
    "two_delta_p",
    "threshold_sq",
    "min_norm_sq",
    "min_norm_decimal",
    "alpha",
    "beta",
    "paper_branch_bound",
    "verdict",
];

pub fn certificates_csv(header: &Value, certs: &[CertificateReport]) -> csv::Result<String> {
    let rows = certs
        .iter()
        .map(|c| {
            vec![
                c.m.to_string(),
                c.dimension.to_string(),
                c.delta_p.to_string(),
                c.two_delta_p.to_string(),
                c.threshold_sq().to_string(),
                c.min_norm_sq.to_string(),
                fmt_float(Some(c.min_norm_sq.to_f64().sqrt())),
                c.argmin.alpha.to_string(),
                c.argmin.beta.to_string(),
                fmt_float(c.paper_branch_bound),
                match c.verdict {
                    crate::weaver::Verdict::FalsifiesA => "FALSIFIES_A".to_string(),
                    crate::weaver::Verdict::Inconclusive => "INCONCLUSIVE".to_string(),
                },
            ]
        })
        .collect();
    csv_document(header, CERTIFICATE_COLUMNS, rows)
}
