//! Scenario files, the pipelines they drive, and their reports.
//!
//! A scenario is a JSON object with a `kind`, a kind-specific `params`
//! payload and positive `horizons`. Running one yields a [`Report`] and
//! optional artifacts (DOT, CSV, traces). Reports contain no paths, clocks or
//! thread counts outside `timings`, which is always the last field.

mod corpus;
mod dot;
mod kinds;
mod sweep;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::registry::TreeRef;

pub use corpus::{random_pattern, rng};
pub use dot::{export_dot, DotObject};
pub use sweep::{sweep, sweep_csv, SweepPredicate, SweepRow};

pub const TOOL: &str = "treeforge";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_SCHEMA: &str = "treeforge/report/v1";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl ScenarioError {
    pub(crate) fn invalid(e: impl std::fmt::Display) -> Self {
        ScenarioError::Invalid(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Thin,
    Antichain,
    Qrun,
    Name,
    PredicateSweep,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizons {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_max: Option<u32>,
}

impl Horizons {
    fn validate(&self) -> Result<(), ScenarioError> {
        let zero = [
            ("depth", self.depth == Some(0)),
            ("value_bound", self.value_bound == Some(0)),
            ("i_max", self.i_max == Some(0)),
        ];
        match zero.iter().find(|(_, z)| *z) {
            Some((name, _)) => Err(ScenarioError::Invalid(format!("horizon {name} must be positive"))),
            None => Ok(()),
        }
    }

    pub(crate) fn depth(&self) -> Result<usize, ScenarioError> {
        self.depth
            .ok_or_else(|| ScenarioError::Invalid("horizons.depth is required".into()))
    }

    pub(crate) fn value_bound(&self) -> Result<u64, ScenarioError> {
        self.value_bound
            .ok_or_else(|| ScenarioError::Invalid("horizons.value_bound is required".into()))
    }

    pub(crate) fn i_max(&self) -> Result<u32, ScenarioError> {
        self.i_max
            .ok_or_else(|| ScenarioError::Invalid("horizons.i_max is required".into()))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub kind: Kind,
    pub params: Value,
    #[serde(default)]
    pub horizons: Horizons,
    /// Tree names usable in any reference of the payload.
    #[serde(default)]
    pub trees: BTreeMap<String, TreeRef>,
    /// Write DOT figures next to the report.
    #[serde(default)]
    pub dot: bool,
}

impl Scenario {
    pub fn parse(bytes: &[u8]) -> Result<Self, ScenarioError> {
        let sc: Scenario = serde_json::from_slice(bytes).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        if sc.version != 1 {
            return Err(ScenarioError::Invalid(format!("unsupported version {}", sc.version)));
        }
        sc.horizons.validate()?;
        Ok(sc)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Seed for generated corpora only.
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, jobs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Verdict {
            name: name.into(),
            pass,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// A failed construction step.
    pub fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Verdict::new(name, false).with_detail(err.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub file: String,
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub schema: String,
    pub scenario: ScenarioInfo,
    pub pass: bool,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub verdicts: Vec<Verdict>,
    pub certificates: Value,
    /// Everything needed to re-derive the certificates: plans, horizons,
    /// generated trees, seeds.
    pub provenance: Value,
    pub outputs: Value,
    pub artifacts: Vec<String>,
    pub timings: Timings,
}

impl Report {
    /// Pretty JSON without `timings`, for determinism checks.
    pub fn without_timings(&self) -> String {
        let mut v = serde_json::to_value(self).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        serde_json::to_string_pretty(&v).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    /// File name suffix, e.g. `thinned.dot`.
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

/// What a kind pipeline hands back to the runner.
#[derive(Default)]
pub(crate) struct KindOutput {
    pub verdicts: Vec<Verdict>,
    pub certificates: Value,
    pub provenance: Value,
    pub outputs: Value,
    pub artifacts: Vec<Artifact>,
}

fn stem_of(file: &str) -> &str {
    let base = file.rsplit(['/', '\\']).next().unwrap_or(file);
    base.strip_suffix(".json").unwrap_or(base)
}

/// Runs one scenario given its bytes. `file` names it in the report and
/// prefixes its artifacts.
pub fn run_scenario(bytes: &[u8], file: &str, opts: RunOptions) -> Outcome {
    let start = Instant::now();
    let info = ScenarioInfo {
        file: file.to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
        name: None,
        kind: None,
    };
    let result = Scenario::parse(bytes).and_then(|sc| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(ScenarioError::invalid)?;
        let out = pool.install(|| kinds::execute(&sc, opts))?;
        Ok((sc, out))
    });
    let stem = stem_of(file);
    let (report, artifacts) = match result {
        Ok((sc, out)) => {
            let pass = out.verdicts.iter().all(|v| v.pass);
            let artifacts: Vec<Artifact> = out
                .artifacts
                .into_iter()
                .map(|a| Artifact {
                    name: format!("{stem}.{}", a.name),
                    bytes: a.bytes,
                })
                .collect();
            let report = Report {
                tool: TOOL.into(),
                version: VERSION.into(),
                schema: REPORT_SCHEMA.into(),
                scenario: ScenarioInfo {
                    name: sc.name.clone(),
                    kind: Some(sc.kind),
                    ..info
                },
                pass,
                exit_code: if pass { 0 } else { 1 },
                error: None,
                verdicts: out.verdicts,
                certificates: out.certificates,
                provenance: out.provenance,
                outputs: out.outputs,
                artifacts: artifacts.iter().map(|a| a.name.clone()).collect(),
                timings: Timings { total_ms: 0.0 },
            };
            (report, artifacts)
        }
        Err(e) => (error_report(info, &e), Vec::new()),
    };
    let mut report = report;
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Outcome { report, artifacts }
}

fn error_report(scenario: ScenarioInfo, e: &ScenarioError) -> Report {
    Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        schema: REPORT_SCHEMA.into(),
        scenario,
        pass: false,
        exit_code: 2,
        error: Some(e.to_string()),
        verdicts: Vec::new(),
        certificates: Value::Null,
        provenance: Value::Null,
        outputs: Value::Null,
        artifacts: Vec::new(),
        timings: Timings { total_ms: 0.0 },
    }
}

/// Reads `path`, runs it and writes `<stem>.report.json` plus artifacts into
/// `out_dir`. An unreadable file gives an exit-2 report.
pub fn run_file(path: &Path, out_dir: &Path, opts: RunOptions) -> std::io::Result<Report> {
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let outcome = match std::fs::read(path) {
        Ok(bytes) => run_scenario(&bytes, &file, opts),
        Err(e) => Outcome {
            report: error_report(
                ScenarioInfo {
                    file: file.clone(),
                    sha256: String::new(),
                    name: None,
                    kind: None,
                },
                &ScenarioError::Parse(e.to_string()),
            ),
            artifacts: Vec::new(),
        },
    };
    write_outcome(&outcome, &file, out_dir)?;
    Ok(outcome.report)
}

pub fn write_outcome(outcome: &Outcome, file: &str, out_dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    for a in &outcome.artifacts {
        std::fs::write(out_dir.join(&a.name), &a.bytes)?;
    }
    let mut json = serde_json::to_string_pretty(&outcome.report).map_err(std::io::Error::other)?;
    json.push('\n');
    std::fs::write(out_dir.join(format!("{}.report.json", stem_of(file))), json)
}
