//! Report serialization with reproducible number formatting.
//!
//! Every float is written with 17 significant digits, so a value read back
//! from a report is the same `f64` that was computed.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hardy::InequalityReport;

/// `x` with 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty-printed JSON whose floats use [`format_float`].
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => write!(out, "{i}").unwrap(),
            (_, Some(u), _) => write!(out, "{u}").unwrap(),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(indent + 1, out);
                write_value(item, indent + 1, out);
            }
            newline(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(indent + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
            }
            newline(indent, out);
            out.push('}');
        }
    }
}

fn newline(indent: usize, out: &mut String) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

pub const CSV_COLUMNS: [&str; 12] = [
    "theorem",
    "alpha",
    "p",
    "params",
    "lhs",
    "rhs_interior",
    "boundary_term",
    "margin",
    "subsolution_min_slack",
    "panels",
    "order",
    "pass",
];

/// One row per report; `p` and `params` are `;`-joined.
pub fn reports_to_csv(reports: &[InequalityReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidParameter(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in reports {
        let p = r.p.iter().map(|x| format_float(*x)).collect::<Vec<_>>().join(";");
        let params = r
            .params
            .iter()
            .map(|(k, x)| format!("{k}={}", format_float(*x)))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.theorem.clone(),
            format_float(r.alpha),
            p,
            params,
            format_float(r.lhs),
            format_float(r.rhs_interior),
            format_float(r.boundary_term),
            format_float(r.margin),
            r.subsolution_min_slack.map(format_float).unwrap_or_default(),
            r.quadrature.panels.to_string(),
            r.quadrature.order.to_string(),
            r.pass.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
