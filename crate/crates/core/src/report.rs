//! Suite reports: one record per checked claim, serialized as JSON.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::gf::FieldSpec;
use crate::tclosure::Certificate;

pub const SCHEMA: &str = "tspace-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// A randomized search stalled short of its target.
    Inconclusive,
    /// A result outside the proven statements, recorded for experiment.
    Exploratory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub claim: String,
    pub anchor: String,
    pub status: Status,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Toolchain {
    pub package: &'static str,
    pub version: &'static str,
}

impl Default for Toolchain {
    fn default() -> Self {
        Toolchain {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub suite: String,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub checks: Vec<Check>,
    pub toolchain: Toolchain,
    /// Certificates produced along the way, keyed by file stem.
    #[serde(skip)]
    pub certificates: Vec<(String, Certificate)>,
    #[serde(skip)]
    timings: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, params: Params, field: Option<FieldSpec>) -> SuiteReport {
        SuiteReport {
            schema: SCHEMA,
            suite: suite.to_string(),
            params,
            field,
            checks: Vec::new(),
            toolchain: Toolchain::default(),
            certificates: Vec::new(),
            timings: false,
        }
    }

    /// Records wall time per check. Reports with timings are not
    /// reproducible byte for byte.
    pub fn with_timings(mut self, on: bool) -> SuiteReport {
        self.timings = on;
        self
    }

    /// Runs `f` and records its outcome under `claim` and `anchor`.
    pub fn run(&mut self, claim: &str, anchor: &str, f: impl FnOnce() -> (Status, Value)) {
        let start = Instant::now();
        let (status, detail) = f();
        let wall_ms = self.timings.then(|| start.elapsed().as_millis() as u64);
        self.checks.push(Check {
            claim: claim.to_string(),
            anchor: anchor.to_string(),
            status,
            detail,
            wall_ms,
        });
    }

    pub fn push(&mut self, claim: &str, anchor: &str, status: Status, detail: Value) {
        self.run(claim, anchor, || (status, detail));
    }

    pub fn status(&self) -> Status {
        let has = |s| self.checks.iter().any(|c| c.status == s);
        if has(Status::Fail) {
            Status::Fail
        } else if has(Status::Skipped) {
            Status::Skipped
        } else if has(Status::Inconclusive) {
            Status::Inconclusive
        } else if has(Status::Exploratory) {
            Status::Exploratory
        } else {
            Status::Pass
        }
    }

    /// 0 when every check passed, 1 on any failure, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass => 0,
            Status::Fail => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
