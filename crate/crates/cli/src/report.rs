use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use dyadic_core::Error;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "dyadic-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: String,
    pub params: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &'static str, input: &Path, params: Value, results: Value, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { schema: SCHEMA, command, input: input.display().to_string(), params, results, checks, passed }
    }
}

/// What a subcommand produces: the report, plus an alternative rendering
/// when CSV output was requested.
pub struct Output {
    pub report: Report,
    pub csv: Option<String>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Input(String),
    Assertion(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Config(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    /// Errors raised while reading and validating the input space.
    pub fn input(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParams(_)
            | Error::ScheduleInvalid(_)
            | Error::InvalidTrials
            | Error::UnknownLevel(_)
            | Error::UnknownCenter(_)
            | Error::UnknownPoint(_)
            | Error::InvalidRadius(_)
            | Error::TooLargeForExhaustive { .. }
            | Error::CenterNotInGrid { .. }
            | Error::InvalidProbabilities { .. }
            | Error::DegenerateMeasure
            | Error::InvalidWeight(_) => Failure::Config(msg),
            Error::NotSquare { .. }
            | Error::InvalidEntry { .. }
            | Error::AsymmetricMatrix { .. }
            | Error::NonzeroDiagonal { .. }
            | Error::DuplicatePoint { .. }
            | Error::TriangleViolation { .. }
            | Error::NameCount { .. }
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => Failure::Input(msg),
            _ => Failure::Assertion(msg),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Assertion(m) => write!(f, "assertion failed: {m}"),
        }
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn write(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Config(format!("cannot write report: {e}")))
        }
    }
}
