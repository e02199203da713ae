//! Suite reports: per-check records, summary counts, version and input
//! digest. Records are sorted by name so assembly order does not matter.

use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Option<String>,
    /// Numeric values recorded by the check, keyed by name.
    pub values: Map<String, Value>,
    pub elapsed: Duration,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Check { name: name.into(), status, witness: None, values: Map::new(), elapsed: Duration::ZERO }
    }

    pub fn pass_if(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.into(), v.into());
        self
    }

    fn to_value(&self, timing: bool) -> Value {
        let mut obj = Map::new();
        obj.insert("name".into(), Value::from(self.name.as_str()));
        obj.insert("status".into(), Value::from(self.status.name()));
        obj.insert("witness".into(), self.witness.as_deref().map_or(Value::Null, Value::from));
        obj.insert("values".into(), Value::Object(self.values.clone()));
        if timing {
            obj.insert("elapsed_ms".into(), Value::from(self.elapsed.as_secs_f64() * 1e3));
        }
        Value::Object(obj)
    }
}

/// A part of a suite that could not run on this document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub version: String,
    pub input_digest: String,
    pub suite: String,
    pub seed: u64,
    pub window: u32,
    pub tolerance: f64,
    pub regime: String,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl SuiteReport {
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.skipped.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for c in &self.checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Indeterminate => s.indeterminate += 1,
            }
        }
        s
    }

    /// 0 all pass, 1 any fail, 3 when the only non-passing checks are
    /// indeterminate (or nothing could run).
    pub fn exit_code(&self) -> u8 {
        let s = self.summary();
        if s.fail > 0 {
            1
        } else if s.indeterminate > 0 || self.checks.is_empty() {
            3
        } else {
            0
        }
    }

    /// The report as JSON. Without `timing` the output is a pure function of
    /// document, suite, seed and options.
    pub fn to_value(&self, timing: bool) -> Value {
        let s = self.summary();
        let mut summary = Map::new();
        summary.insert("pass".into(), Value::from(s.pass));
        summary.insert("fail".into(), Value::from(s.fail));
        summary.insert("indeterminate".into(), Value::from(s.indeterminate));
        summary.insert("skipped".into(), Value::from(self.skipped.len()));

        let skipped = self
            .skipped
            .iter()
            .map(|k| {
                let mut obj = Map::new();
                obj.insert("name".into(), Value::from(k.name.as_str()));
                obj.insert("reason".into(), Value::from(k.reason.as_str()));
                Value::Object(obj)
            })
            .collect();

        let mut obj = Map::new();
        obj.insert("schema".into(), Value::from(SCHEMA_VERSION));
        obj.insert("version".into(), Value::from(self.version.as_str()));
        obj.insert("input_digest".into(), Value::from(self.input_digest.as_str()));
        obj.insert("suite".into(), Value::from(self.suite.as_str()));
        obj.insert("seed".into(), Value::from(self.seed));
        obj.insert("window".into(), Value::from(self.window));
        obj.insert("tolerance".into(), Value::from(self.tolerance));
        obj.insert("regime".into(), Value::from(self.regime.as_str()));
        obj.insert("checks".into(), Value::Array(self.checks.iter().map(|c| c.to_value(timing)).collect()));
        obj.insert("skipped".into(), Value::Array(skipped));
        obj.insert("summary".into(), Value::Object(summary));
        Value::Object(obj)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value(true)).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "groupoidal {} suite={} seed={} window={} regime={}", self.version, self.suite, self.seed, self.window, self.regime);
        let _ = writeln!(out, "input sha256 {}", self.input_digest);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = write!(out, "{:<13} {:<width$}", c.status.name(), c.name);
            for (k, v) in &c.values {
                let _ = write!(out, " {k}={v}");
            }
            if let Some(w) = &c.witness {
                let _ = write!(out, " witness: {w}");
            }
            let _ = writeln!(out, " ({:.1} ms)", c.elapsed.as_secs_f64() * 1e3);
        }
        for k in &self.skipped {
            let _ = writeln!(out, "{:<13} {:<width$} {}", "skipped", k.name, k.reason);
        }
        let s = self.summary();
        let _ = writeln!(out, "{} passed, {} failed, {} indeterminate, {} skipped", s.pass, s.fail, s.indeterminate, self.skipped.len());
        out
    }
}
