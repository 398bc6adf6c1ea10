//! One report object per invocation. The human rendering and the JSON file
//! are both produced from it.

use std::collections::BTreeMap;

use bjorth::catalog::SuiteReport;
use bjorth::Verdict;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct CommandReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub result: BTreeMap<String, Value>,
    /// Drives the exit status when present.
    pub verdict: Option<Verdict>,
    pub notes: Vec<String>,
}

impl CommandReport {
    pub fn new(command: &str) -> CommandReport {
        CommandReport {
            command: command.into(),
            parameters: BTreeMap::new(),
            result: BTreeMap::new(),
            verdict: None,
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn result(&mut self, key: &str, v: impl Serialize) {
        self.result.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    fn render(&self) -> String {
        let head = match self.verdict {
            Some(v) => format!("{}: {}\n", self.command, verdict_word(v)),
            None => format!("{}\n", self.command),
        };
        let mut out = head;
        for (k, v) in &self.parameters {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        for (k, v) in &self.result {
            out.push_str(&format!("  {k}: {v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Indeterminate => "indeterminate",
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    Command(CommandReport),
    Suite(SuiteReport),
    Suites(Vec<SuiteReport>),
}

impl Report {
    pub fn render(&self) -> String {
        match self {
            Report::Command(c) => c.render(),
            Report::Suite(s) => s.render(),
            Report::Suites(all) => {
                let mut out: String = all.iter().map(|s| s.render()).collect::<Vec<_>>().join("\n");
                let failed: Vec<&str> = all.iter().filter(|s| !s.passed).map(|s| s.suite.as_str()).collect();
                out.push_str(&format!(
                    "\n{} of {} suites passed{}\n",
                    all.len() - failed.len(),
                    all.len(),
                    if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) }
                ));
                out
            }
        }
    }

    /// 0 holds or passes, 1 fails, 2 indeterminate.
    pub fn exit_code(&self) -> u8 {
        let suite_code = |s: &SuiteReport| {
            if s.counts.fail > 0 {
                1
            } else if s.counts.indeterminate > 0 {
                2
            } else {
                0
            }
        };
        match self {
            Report::Command(c) => match c.verdict {
                Some(Verdict::Fails) => 1,
                Some(Verdict::Indeterminate) => 2,
                _ => 0,
            },
            Report::Suite(s) => suite_code(s),
            Report::Suites(all) => {
                let codes: Vec<u8> = all.iter().map(suite_code).collect();
                if codes.contains(&1) {
                    1
                } else {
                    codes.into_iter().max().unwrap_or(0)
                }
            }
        }
    }
}
