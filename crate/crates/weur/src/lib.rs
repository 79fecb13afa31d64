//! File formats, sweeps and error reporting around `weur-core`, used by the `weur` binary.

pub mod output;
pub mod scenario;
pub mod sweep;

use serde_json::json;

pub use scenario::{Scenario, ScenarioError, ScenarioFile};

/// How a failure is reported by the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input or violated preconditions.
    Validation,
    /// A numerical routine could not reach a trustworthy result.
    Numerical,
    Other,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Other => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Numerical => "numerical",
            ErrorKind::Other => "other",
        }
    }
}

pub fn classify(err: &anyhow::Error) -> ErrorKind {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<weur_core::Error>() {
            return if e.is_numerical() { ErrorKind::Numerical } else { ErrorKind::Validation };
        }
        if cause.is::<ScenarioError>() || cause.is::<serde_json::Error>() {
            return ErrorKind::Validation;
        }
    }
    ErrorKind::Other
}

/// Machine-readable error record for the error stream.
pub fn error_record(err: &anyhow::Error) -> serde_json::Value {
    let kind = classify(err);
    let violations = err
        .chain()
        .find_map(|c| match c.downcast_ref::<ScenarioError>() {
            Some(ScenarioError { diagnostics: Some(d), .. }) => Some(d.violations.clone()),
            _ => match c.downcast_ref::<weur_core::Error>() {
                Some(weur_core::Error::InvalidEnsemble(v)) => Some(v.clone()),
                _ => None,
            },
        })
        .unwrap_or_default();
    json!({
        "error": kind.label(),
        "exit_code": kind.exit_code(),
        "message": format!("{err:#}"),
        "violations": violations,
    })
}
