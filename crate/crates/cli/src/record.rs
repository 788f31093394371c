//! One unit of command output: a JSON line or a block of text.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    /// A required verdict that fails is a theorem violation.
    pub required: bool,
}

#[derive(Debug, Clone)]
pub struct Record {
    pub command: String,
    pub inputs: Value,
    /// Named results, in display order.
    pub results: Vec<(String, Value)>,
    pub verdicts: Vec<Verdict>,
    pub factors: Vec<String>,
    pub timing: Option<f64>,
    /// Text rendering; built from the fields when empty.
    pub text: Vec<String>,
}

impl Record {
    pub fn new(command: &str, inputs: Value) -> Self {
        Record {
            command: command.to_string(),
            inputs,
            results: Vec::new(),
            verdicts: Vec::new(),
            factors: Vec::new(),
            timing: None,
            text: Vec::new(),
        }
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.push((key.to_string(), value.into()));
        self
    }

    pub fn observed(&mut self, name: &str, holds: bool) -> &mut Self {
        self.verdicts.push(Verdict { name: name.to_string(), holds, required: false });
        self
    }

    pub fn required(&mut self, name: &str, holds: bool) -> &mut Self {
        self.verdicts.push(Verdict { name: name.to_string(), holds, required: true });
        self
    }

    pub fn line(&mut self, text: impl Into<String>) -> &mut Self {
        self.text.push(text.into());
        self
    }

    pub fn json(&self) -> String {
        let results: Map<String, Value> = self.results.iter().cloned().collect();
        let verdicts: Vec<Value> = self
            .verdicts
            .iter()
            .map(|v| json!({ "name": v.name, "holds": v.holds, "required": v.required }))
            .collect();
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "results": results,
            "verdicts": verdicts,
            "factors": self.factors,
            "timing": self.timing,
        })
        .to_string()
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        if self.text.is_empty() {
            for (k, v) in &self.results {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let _ = writeln!(out, "{}: {shown}", k.replace('_', " "));
            }
            for v in &self.verdicts {
                let _ = writeln!(out, "{}: {}", v.name.replace('_', " "), v.holds);
            }
        } else {
            for l in &self.text {
                let _ = writeln!(out, "{l}");
            }
        }
        if let Some(ms) = self.timing {
            let _ = writeln!(out, "timing: {ms:.3} ms");
        }
        out
    }

    /// The failed required verdicts, as an internal error.
    pub fn violation(&self) -> Option<CliError> {
        let failed: Vec<&str> =
            self.verdicts.iter().filter(|v| v.required && !v.holds).map(|v| v.name.as_str()).collect();
        if failed.is_empty() {
            None
        } else {
            Some(CliError::internal(format!("{}: theorem violation: {}", self.command, failed.join(", "))))
        }
    }
}
