//! Command-line orchestration: parse inputs, run one demonstration, and
//! render a deterministic report or a comma-separated table.
//!
//! Exit codes: 0 when every check in the report passes, 1 when a check
//! fails, 2 for unreadable or invalid inputs.

mod args;
mod commands;
mod scenario;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub use args::{Cli, Command, Format};
pub use scenario::Scenario;

/// Seed used when `--seed` is not given. All sampling draws from
/// `ChaCha8Rng::seed_from_u64(seed)`.
pub const DEFAULT_SEED: u64 = 1956;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: parse error: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Fsm(#[from] crate::fsm::FsmError),
    #[error(transparent)]
    Quantum(#[from] crate::quantum::QuantumError),
    #[error(transparent)]
    Observation(#[from] crate::observation::ObservationError),
    #[error(transparent)]
    Nogo(#[from] crate::nogo::NogoError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        EXIT_INPUT_ERROR
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// The structured report every command produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// What a command produced, before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub table: Table,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Report => {
                let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Table => self.table.to_csv(),
        }
    }
}

pub(crate) struct ReportBuilder {
    command: &'static str,
    seed: u64,
    inputs: Value,
    checks: Vec<Check>,
}

impl ReportBuilder {
    pub fn new(command: &'static str, seed: u64, inputs: Value) -> Self {
        ReportBuilder {
            command,
            seed,
            inputs,
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool) -> &mut Self {
        self.checks.push(Check {
            name: name.to_owned(),
            passed,
        });
        self
    }

    pub fn finish(self, results: Value, table: Table) -> Outcome {
        let passed = self.checks.iter().all(|c| c.passed);
        Outcome {
            report: Report {
                command: self.command.to_owned(),
                version: env!("CARGO_PKG_VERSION").to_owned(),
                seed: self.seed,
                inputs: self.inputs,
                results,
                checks: self.checks,
                passed,
            },
            table,
        }
    }
}

/// Runs the parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    commands::dispatch(cli)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Short human summary for stderr.
pub fn summary(outcome: &Outcome) -> String {
    let mut s = String::new();
    for c in &outcome.report.checks {
        let _ = writeln!(s, "{} {}", if c.passed { "pass" } else { "FAIL" }, c.name);
    }
    s
}

pub(crate) fn fmt_f64(x: f64) -> String {
    // Shortest representation that round-trips.
    format!("{x:?}")
}
