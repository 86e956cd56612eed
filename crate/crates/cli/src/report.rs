use serde::Serialize;
use serde_json::Value;
use translie_core::lab::Mode;
use translie_core::{CheckReport, Window};

use crate::config::RunConfig;

/// One verified statement.
#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub law: String,
    /// The statement being verified, in words.
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    pub cases_run: u64,
    pub passed: bool,
    pub violation_count: u64,
    pub violations: Vec<Value>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Entry {
    pub fn from_check(report: &CheckReport, anchor: &str) -> Self {
        let mut details = serde_json::Map::new();
        details.insert("formula".into(), report.law.formula().into());
        if let Some(seed) = report.seed {
            details.insert("seed".into(), seed.into());
        }
        Entry {
            law: report.law.id().to_owned(),
            anchor: anchor.to_owned(),
            mode: Some(report.mode),
            window: Some(report.window),
            cases_run: report.cases_run,
            passed: report.passed(),
            violation_count: report.violation_count,
            violations: report
                .violations
                .iter()
                .map(|v| serde_json::to_value(v).expect("serializable"))
                .collect(),
            details: Value::Object(details),
        }
    }

    pub fn new(law: &str, anchor: &str, cases_run: u64, violations: Vec<Value>, details: Value) -> Self {
        Entry {
            law: law.to_owned(),
            anchor: anchor.to_owned(),
            mode: None,
            window: None,
            cases_run,
            passed: violations.is_empty(),
            violation_count: violations.len() as u64,
            violations,
            details,
        }
    }

    pub fn with_label(mut self, suffix: &str) -> Self {
        self.law = format!("{}/{suffix}", self.law);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub entries: Vec<Entry>,
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(config: RunConfig, entries: Vec<Entry>) -> Self {
        let verdict = if entries.iter().all(|e| e.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        RunReport {
            version: env!("CARGO_PKG_VERSION"),
            command: config.command.name(),
            config,
            verdict,
            entries,
            timing_ms: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        text
    }

    /// One line per entry.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let tag = if e.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{tag} {} ({} cases, {} violations)\n",
                e.law, e.cases_run, e.violation_count
            ));
        }
        out.push_str(&format!(
            "verdict: {}\n",
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            }
        ));
        out
    }
}
