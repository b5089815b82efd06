//! `JobReport` and the JSON encodings of algebraic data.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Map, Value};
use toric_k::{Cochain, Fan, GroupRingElement, Section};

/// Outcome classes, mapped to process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Success,
    VerificationFailure,
    InputError,
    GaveUp,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::VerificationFailure => 1,
            ExitStatus::InputError => 2,
            ExitStatus::GaveUp => 3,
        }
    }
}

/// Everything a command produced. Keys are kept sorted and no timings are
/// recorded, so identical inputs give byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub certificates: Vec<Value>,
    pub statistics: Map<String, Value>,
    pub warnings: Vec<String>,
    pub exit_status: ExitStatus,
}

impl JobReport {
    pub fn new(command: &str) -> Self {
        JobReport {
            command: command.to_string(),
            inputs: Map::new(),
            results: Map::new(),
            certificates: Vec::new(),
            statistics: Map::new(),
            warnings: Vec::new(),
            exit_status: ExitStatus::Success,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) {
        self.inputs.insert(key.to_string(), v.into());
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.to_string(), v.into());
    }

    pub fn stat(&mut self, key: &str, v: impl Into<Value>) {
        self.statistics.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are plain JSON")
    }

    /// Indented plain-text rendering of the same data.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "status: {:?} (exit {})", self.exit_status, self.exit_status.code());
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for (title, map) in [
            ("inputs", &self.inputs),
            ("results", &self.results),
            ("statistics", &self.statistics),
        ] {
            if !map.is_empty() {
                let _ = writeln!(out, "{title}:");
                render(&mut out, &Value::Object(map.clone()), 1);
            }
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(
                out,
                "certificates: {} (use --json to see them)",
                self.certificates.len()
            );
        }
        out
    }
}

fn render(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if is_scalar(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    render(out, x, indent + 1);
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_scalar(x) {
                    let _ = writeln!(out, "{pad}- {}", scalar(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    render(out, x, indent + 1);
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", scalar(v));
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_array() && !x.is_object()) || a.iter().all(is_scalar_vector),
        Value::Object(_) => false,
        _ => true,
    }
}

fn is_scalar_vector(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(|x| x.is_number() || x.is_string()))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Integers that fit in `i64` become JSON numbers, larger ones strings.
pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

pub fn int_vec(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn int_rows(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(rows.iter().map(|r| int_vec(r)).collect())
}

/// `[[coords, coeff], ...]` in normal-form coordinates.
pub fn element(x: &GroupRingElement) -> Value {
    Value::Array(x.terms().iter().map(|(k, c)| json!([int_vec(k), int(c)])).collect())
}

pub fn cochain(fan: &Fan, c: &Cochain, complex: &toric_k::CechComplex) -> Value {
    let slots: Vec<Value> = c
        .components()
        .iter()
        .map(|(t, x)| {
            let slot = complex
                .slots(c.level())
                .iter()
                .find(|s| &s.tuple == t)
                .expect("valid slot");
            json!({
                "slot": t,
                "cone": fan.cones()[slot.cone].ray_ids,
                "terms": element(x),
            })
        })
        .collect();
    json!({ "level": c.level(), "components": slots })
}

pub fn section(fan: &Fan, s: &Section) -> Value {
    let comps: Vec<Value> = s
        .components()
        .iter()
        .map(|(&m, x)| json!({ "cone": fan.cones()[m].ray_ids, "terms": element(x) }))
        .collect();
    let domain: Vec<Value> = s
        .domain()
        .max_cones(fan)
        .iter()
        .map(|&m| json!(fan.cones()[m].ray_ids))
        .collect();
    json!({ "domain_max_cones": domain, "components": comps })
}
