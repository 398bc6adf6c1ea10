//! Executable reproductions of the worked examples, symmetric-point scans
//! and case analyses, each emitting a [`SuiteReport`].
//!
//! Reports are deterministic functions of their parameters and seed: no
//! timing fields, ordered maps, fixed float formatting.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cones::{TriState, Verdict};
use crate::settings::Settings;

mod examples;
mod operator_cases;
mod scans;
mod searches;

pub use examples::{example_1_1_suite, example_2_2_suite};
pub use operator_cases::{case_specs, thm_2_10_cases, CaseSpec210};
pub use scans::{mutual_pairs, prop_2_8_scan, prop_2_9_scan, symmetric_points};
pub use searches::{
    conjecture_2_13_search, hilbert_bhatia_semrl_suite, invertibility_suite, right_asymmetry_suite,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Indeterminate,
    /// Reported for the record; carries no expectation.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub description: String,
    pub expected: String,
    pub observed: String,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
    pub info: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub parameters: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Suite-specific machine-readable detail (case tables, survivors).
    pub artifacts: BTreeMap<String, Value>,
    pub counts: Counts,
    pub passed: bool,
}

impl SuiteReport {
    pub(crate) fn new(suite: &str, settings: &Settings) -> SuiteReport {
        let mut r = SuiteReport {
            suite: suite.to_string(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            artifacts: BTreeMap::new(),
            counts: Counts::default(),
            passed: true,
        };
        r.param("tol", settings.eps);
        r.param("band", settings.band);
        r
    }

    pub(crate) fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub(crate) fn artifact(&mut self, key: &str, v: impl Serialize) {
        self.artifacts.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub(crate) fn push(&mut self, description: impl Into<String>, expected: impl Display, observed: impl Display, status: CheckStatus) {
        match status {
            CheckStatus::Pass => self.counts.pass += 1,
            CheckStatus::Fail => self.counts.fail += 1,
            CheckStatus::Indeterminate => self.counts.indeterminate += 1,
            CheckStatus::Info => self.counts.info += 1,
        }
        self.passed = self.counts.fail == 0 && self.counts.indeterminate == 0;
        self.checks.push(Check {
            description: description.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            status,
        });
    }

    pub(crate) fn expect(&mut self, description: impl Into<String>, expected: impl Display, observed: impl Display, ok: bool) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.push(description, expected, observed, status);
    }

    pub(crate) fn expect_verdict(&mut self, description: impl Into<String>, expected: Verdict, got: TriState) {
        let status = if got.verdict == expected {
            CheckStatus::Pass
        } else if got.is_indeterminate() {
            CheckStatus::Indeterminate
        } else {
            CheckStatus::Fail
        };
        self.push(description, verdict_name(expected), tri(got), status);
    }

    pub(crate) fn info(&mut self, description: impl Into<String>, observed: impl Display) {
        self.push(description, "-", observed, CheckStatus::Info);
    }

    /// Human-readable rendering of the same data the JSON carries.
    pub fn render(&self) -> String {
        let mut out = format!("suite {}: {}\n", self.suite, if self.passed { "PASS" } else { "FAIL" });
        for (k, v) in &self.parameters {
            out.push_str(&format!("  param {k} = {v}\n"));
        }
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Indeterminate => "indet",
                CheckStatus::Info => "info",
            };
            out.push_str(&format!("  [{tag:>5}] {}: expected {}, observed {}\n", c.description, c.expected, c.observed));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out.push_str(&format!(
            "  {} pass, {} fail, {} indeterminate, {} info\n",
            self.counts.pass, self.counts.fail, self.counts.indeterminate, self.counts.info
        ));
        out
    }
}

pub(crate) fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Indeterminate => "indeterminate",
    }
}

pub(crate) fn tri(t: TriState) -> String {
    format!("{} (margin {})", verdict_name(t.verdict), num(t.margin))
}

/// Fixed-format float for report strings.
pub(crate) fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        format!("{x}")
    }
}

pub(crate) fn vec_str(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.9}")).collect();
    format!("({})", parts.join(", "))
}

/// Angle between two planar vectors, in `[0, π]`.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.abs().atan2(dot)
}
