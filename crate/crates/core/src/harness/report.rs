//! Verification report: per-check records, JSON and text rendering.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Duration;

use serde::Serialize;

use crate::residual::Residual;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub name: String,
    pub anchor: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub residual: Residual,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub status: Status,
    pub checks: Vec<CheckRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl VerificationReport {
    pub fn new(checks: Vec<CheckRecord>) -> Self {
        let status = if checks.iter().any(|c| c.status == Status::Fail) { Status::Fail } else { Status::Pass };
        Self { status, checks }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Pretty JSON. Timings appear only when `timings` is set, so the default
    /// output is byte-identical across runs.
    pub fn to_json(&self, timings: bool) -> String {
        let mut rep = self.clone();
        for c in &mut rep.checks {
            c.elapsed_ms = timings.then(|| c.elapsed.as_millis());
        }
        let mut s = serde_json::to_string_pretty(&rep).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.suite.len() + c.name.len() + 1).max().unwrap_or(0);
        for c in &self.checks {
            let label = format!("{}/{}", c.suite, c.name);
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let _ = write!(out, "{status}  {label:<width$}  {:>8.3}s", c.elapsed.as_secs_f64());
            if !c.residual.is_zero() || c.residual.first.is_some() {
                let _ = write!(out, "  residual {} term(s)", c.residual.terms);
                if let Some(f) = &c.residual.first {
                    let _ = write!(out, ", first: {f}");
                }
            }
            out.push('\n');
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let skipped = self.checks.iter().filter(|c| c.status == Status::Skipped).count();
        let _ = writeln!(
            out,
            "{}: {} checks, {} failed, {} skipped",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed,
            skipped
        );
        out
    }

    pub fn render(&self, format: Format, timings: bool) -> String {
        match format {
            Format::Json => self.to_json(timings),
            Format::Text => self.to_text(),
        }
    }
}
