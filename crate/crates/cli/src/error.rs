use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Config { field: Option<String>, message: String },

    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    #[error("table error: {0}")]
    Table(String),

    #[error("worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: Some(field.into()),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        let v = match self {
            CliError::Config { field, message } => json!({"error": "config", "field": field, "message": message}),
            CliError::Io { path, message } => json!({"error": "io", "path": path, "message": message}),
            CliError::Table(m) => json!({"error": "table", "message": m}),
            CliError::Pool(m) => json!({"error": "pool", "message": m}),
        };
        v.to_string()
    }
}
