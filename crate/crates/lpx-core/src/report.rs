//! Shared reporting types and JSON helpers.
//!
//! All reports serialize through `serde_json::Value` built here so that the
//! emitted JSON is deterministic (keys are sorted by the default map) and
//! every float is rounded to 12 significant digits first.

use num_complex::Complex64;
use serde_json::{json, Value};

/// One verified identity or bound.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub identity: String,
    pub residual: f64,
    /// Whether the check ran in exact (integer/rational) arithmetic.
    pub exact: bool,
    pub pass: bool,
}

impl CheckLine {
    pub fn exact_eq(identity: impl Into<String>, residual: f64) -> CheckLine {
        CheckLine {
            identity: identity.into(),
            residual,
            exact: true,
            pass: residual == 0.0,
        }
    }

    pub fn numeric(identity: impl Into<String>, residual: f64, tol: f64) -> CheckLine {
        CheckLine {
            identity: identity.into(),
            residual,
            exact: false,
            pass: residual <= tol,
        }
    }
}

/// A named bundle of checks, with free-form notes for logged discrepancies
/// and conventions.
#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub name: String,
    pub lines: Vec<CheckLine>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> CheckReport {
        CheckReport {
            name: name.into(),
            lines: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, line: CheckLine) {
        self.lines.push(line);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn failures(&self) -> Vec<&CheckLine> {
        self.lines.iter().filter(|l| !l.pass).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "pass": self.all_pass(),
            "checks": self
                .lines
                .iter()
                .map(|l| {
                    json!({
                        "identity": l.identity,
                        "residual": sig12(l.residual),
                        "exact": l.exact,
                        "pass": l.pass,
                    })
                })
                .collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

/// Round to 12 significant digits; keeps report bytes stable across runs.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(sig12(x))
    } else if x.is_infinite() && x > 0.0 {
        json!("inf")
    } else if x.is_infinite() {
        json!("-inf")
    } else {
        json!("nan")
    }
}

/// Complex numbers serialize as `[re, im]`.
pub fn json_complex(z: Complex64) -> Value {
    json!([sig12(z.re), sig12(z.im)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds() {
        let rounded = sig12(2.0_f64.sqrt());
        assert_eq!(format!("{rounded}"), "1.41421356237");
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(123456789.0), 123456789.0);
    }

    #[test]
    fn report_pass_logic() {
        let mut r = CheckReport::new("demo");
        r.push(CheckLine::exact_eq("a == a", 0.0));
        assert!(r.all_pass());
        r.push(CheckLine::numeric("b ~ c", 1e-3, 1e-6));
        assert!(!r.all_pass());
        assert_eq!(r.failures().len(), 1);
    }
}
