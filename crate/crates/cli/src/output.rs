//! Stable output formats. Every printer here is deterministic: sorted
//! keys, lexicographic point order, exact rationals.

use cooc_core::rational::{decimal_rendering, format_rat, Rat};
use serde::Serialize;

/// A scalar result line: `p/q`, an optional decimal rendering in
/// parentheses, and the null-condition marker when the zero came from an
/// impossible condition.
pub fn scalar_line(value: &Rat, null_condition: bool, decimal: Option<u32>) -> String {
    let mut line = format_rat(value);
    if let Some(digits) = decimal {
        line.push_str(&format!(" ({})", decimal_rendering(value, digits)));
    }
    if null_condition {
        line.push_str(" [null-condition]");
    }
    line
}

/// Comma-separated rationals in point order.
pub fn csv_line(values: &[Rat]) -> String {
    values.iter().map(format_rat).collect::<Vec<_>>().join(",")
}

/// A pointwise conditional: values per source outcome plus the support.
#[derive(Serialize)]
pub struct PointwiseDoc {
    pub source: String,
    pub support: Vec<usize>,
    pub values: Vec<String>,
}

/// One check report line for `--json` mode.
#[derive(Serialize)]
pub struct CheckDoc {
    pub cases: usize,
    pub failures: Vec<String>,
    pub id: String,
    pub label: String,
}

#[derive(Serialize)]
pub struct CheckRunDoc {
    pub checks: Vec<CheckDoc>,
    pub passed: bool,
}
