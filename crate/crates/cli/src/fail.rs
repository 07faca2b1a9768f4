use std::fmt;

use distrode::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_AFFINE: i32 = 4;

/// Failure that ends a command before a report can be written.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::runtime(format!("{}: {err}", path.display()))
    }

    /// serde's message ends with the line and column.
    pub fn json(path: &std::path::Path, err: serde_json::Error) -> Self {
        CliError::validation(format!("{}: malformed input: {err}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Quadrature { .. } | Error::StepSizeCollapse { .. } => EXIT_RUNTIME,
            _ => EXIT_VALIDATION,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
