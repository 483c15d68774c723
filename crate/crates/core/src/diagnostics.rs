//! Structured diagnostics shared by the pipeline stages.
//!
//! Recoverable oddities in the input (unresolvable ids, duplicate ids,
//! inconsistent labels) never abort a run; they are collected as
//! [`Diagnostic`] records and surfaced on the error stream by the CLI.

use serde::{Deserialize, Serialize};
use std::fmt;

/// How serious a diagnostic is. Errors are still non-fatal; they mark
/// records the pipeline had to repair or drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// Where in the source document a diagnostic points, when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    /// 1-based line and column in the XML input.
    Position { line: u64, column: u64 },
    /// An element identified by its xmi.id.
    Element(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Position { line, column } => write!(f, "{line}:{column}"),
            Location::Element(id) => write!(f, "element {id}"),
        }
    }
}

/// One structured diagnostic record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub location: Option<Location>,
}

impl Diagnostic {
    pub fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
            location: None,
        }
    }

    pub fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            location: None,
        }
    }

    pub fn at_element(mut self, id: impl Into<String>) -> Self {
        self.location = Some(Location::Element(id.into()));
        self
    }

    pub fn at_position(mut self, line: u64, column: u64) -> Self {
        self.location = Some(Location::Position { line, column });
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(loc) => write!(f, "{}: {} ({})", self.severity, self.message, loc),
            None => write!(f, "{}: {}", self.severity, self.message),
        }
    }
}
