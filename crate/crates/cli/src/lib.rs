//! Library side of the `sepface` command-line tool: file formats and the commands,
//! each returning an exit code together with a human-readable and a JSON report.
//!
//! Exit codes: 0 when the property holds, 1 when it fails, 2 on usage or input errors.

pub mod commands;
pub mod files;

use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input, or arguments the library rejects.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] sepface::Error),
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub human: String,
    pub json: Value,
    /// Printed to stderr regardless of output mode.
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn new(holds: bool, human: String, json: Value) -> Self {
        Self {
            code: if holds { 0 } else { 1 },
            human,
            json,
            warnings: Vec::new(),
        }
    }
}
