use std::fmt;

use serde_json::json;

/// Failure of a CLI run; rendered as one JSON line on stderr.
#[derive(Debug)]
pub enum CliError {
    Core(biphasic_core::Error),
    Usage { field: String, message: String },
    Io { path: String, message: String },
}

impl CliError {
    pub fn usage(field: &str, message: impl Into<String>) -> Self {
        CliError::Usage {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Core(e) if e.kind() == "validation" => 2,
            CliError::Io { .. } => 3,
            CliError::Core(_) => 1,
        }
    }

    pub fn record(&self) -> serde_json::Value {
        let body = match self {
            CliError::Core(e) => json!({
                "kind": e.kind(),
                "module": e.module(),
                "message": e.to_string(),
            }),
            CliError::Usage { field, message } => json!({
                "kind": "usage",
                "module": "cli",
                "field": field,
                "message": message,
            }),
            CliError::Io { path, message } => json!({
                "kind": "io",
                "module": "cli",
                "field": path,
                "message": message,
            }),
        };
        json!({ "error": body })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage { field, message } => write!(f, "{field}: {message}"),
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl From<biphasic_core::Error> for CliError {
    fn from(e: biphasic_core::Error) -> Self {
        CliError::Core(e)
    }
}
