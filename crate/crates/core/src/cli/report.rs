use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, ErrorKind};

pub const SCHEMA_VERSION: &str = "1";

/// A named residual and its tolerance; passes iff `residual ≤ tolerance`.
/// A missing residual (the computation failed) never passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let residual = residual.is_finite().then_some(residual);
        Check { name: name.into(), pass: residual.is_some_and(|r| r <= tolerance), residual, tolerance, detail: None }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Check { name: name.into(), residual: None, tolerance, pass: false, detail: Some(format!("{}: {err}", err.name())) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub name: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        let kind = match e.kind() {
            ErrorKind::Domain => "domain",
            ErrorKind::Input => "input",
        };
        ErrorInfo { kind: kind.into(), name: e.name().into(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub inputs: Value,
    pub values: Value,
    pub abs_error: f64,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub evals: u64,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            inputs,
            values: Value::Object(Default::default()),
            abs_error: 0.0,
            checks: Vec::new(),
            seed,
            evals: 0,
            wall_time_ms: 0,
            error: None,
        }
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        if let Value::Object(m) = &mut self.values {
            m.insert(key.into(), v);
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// JSON text without the timing field, for comparisons.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0;
        serde_json::to_string(&r).expect("reports serialize")
    }
}

/// `[re, im]` for a complex value, as it appears in `values`.
pub fn cjson(z: num_complex::Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}
