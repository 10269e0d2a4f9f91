use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Check, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The check could not run, e.g. over budget.
    Error,
}

/// How equality or membership was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exhaustive,
    AlignedEvaluator,
    Bsgs,
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: Check,
    pub parameters: Value,
    pub verdict: Outcome,
    pub provenance: Provenance,
    /// Counterexample, failing stage or error, when the verdict is not a pass.
    pub witness: Option<Value>,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.verdict == Outcome::Pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    pub limitations: Vec<String>,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<CheckRecord>) -> Self {
        let passed = checks.iter().all(CheckRecord::passed);
        Report {
            tool: "rcalab",
            version: env!("CARGO_PKG_VERSION"),
            config,
            checks,
            passed,
            limitations: vec![
                "Only finite windows are checked; embedding every finitely generated \
                 subgroup needs external results and an unquantified window length."
                    .into(),
                "The involution F is a finitely verified candidate, not a proof of the \
                 infinite-support property."
                    .into(),
            ],
        }
    }

    /// Text summary, one line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.checks {
            let tag = match r.verdict {
                Outcome::Pass => "PASS ",
                Outcome::Fail => "FAIL ",
                Outcome::Error => "ERROR",
            };
            out.push_str(&format!(
                "{tag} {:<24} {:>8} ms  {:?}\n",
                r.check.name(),
                r.elapsed_ms,
                r.provenance
            ));
            if let Some(w) = &r.witness {
                out.push_str(&format!("      {w}\n"));
            }
        }
        let verdict = if self.passed { "all checks passed" } else { "some checks failed" };
        out.push_str(verdict);
        out.push('\n');
        out
    }
}

/// Accumulates one record while a check runs.
pub struct Recorder {
    check: Check,
    start: Instant,
    parameters: serde_json::Map<String, Value>,
    notes: Vec<String>,
    provenance: Provenance,
}

impl Recorder {
    pub fn new(check: Check, provenance: Provenance) -> Self {
        Recorder {
            check,
            start: Instant::now(),
            parameters: serde_json::Map::new(),
            notes: Vec::new(),
            provenance,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn provenance(&mut self, p: Provenance) {
        self.provenance = p;
    }

    pub fn finish(self, verdict: Outcome, witness: Option<Value>) -> CheckRecord {
        CheckRecord {
            check: self.check,
            parameters: Value::Object(self.parameters),
            verdict,
            provenance: self.provenance,
            witness,
            notes: self.notes,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}
