use std::fmt;

use ndlab::NdError;
use serde::Serialize;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Usage,
    Infeasible,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage => 2,
            Kind::Infeasible => 3,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Usage, message: message.into() }
    }

    /// One JSON object on a single line, for stderr.
    pub fn diagnostic(&self) -> String {
        #[derive(Serialize)]
        struct Diagnostic<'a> {
            schema: &'static str,
            level: &'static str,
            kind: Kind,
            exit_code: i32,
            message: &'a str,
        }
        serde_json::to_string(&Diagnostic {
            schema: "ndlab.diagnostic/1",
            level: "error",
            kind: self.kind,
            exit_code: self.kind.exit_code(),
            message: &self.message,
        })
        .expect("diagnostic serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<NdError> for CliError {
    fn from(e: NdError) -> Self {
        let kind = match e {
            NdError::HyperperiodTooLarge { .. } | NdError::HorizonOverflow(_) => Kind::Infeasible,
            ref e if e.is_infeasible() => Kind::Infeasible,
            _ => Kind::Usage,
        };
        CliError { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::usage(format!("csv error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
