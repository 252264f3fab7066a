//! Level files, the seeded level generator and the benchmark harness.

mod bench;
mod generate;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::domain::{Level, LevelError};

pub use bench::{
    certify_exposed, generate_suite, load_level_dir, parse_csv, run_benchmark, write_csv, BenchConfig, BenchLevel,
    BenchReport, BenchmarkRow, Summary, CSV_HEADER,
};
pub use generate::{generate_level, GenParams, GenerateError, MAX_STACK_HEIGHT, PIG_SLOTS};

#[derive(Debug, Error)]
pub enum IoError {
    /// Malformed or mistyped document; `path` is the offending key path,
    /// `.` for the document root.
    #[error("{path}: {message}")]
    Document { path: String, message: String },
    #[error("invalid level: {0}")]
    Invalid(#[from] LevelError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{}: {message}", path.display())]
    File { path: PathBuf, message: String },
    #[error("the level set is empty")]
    EmptyLevelSet,
    #[error("csv: {0}")]
    Csv(String),
}

/// Parses and validates a level document.
pub fn parse_level(text: &str) -> Result<Level, IoError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let level: Level = serde_path_to_error::deserialize(&mut de).map_err(|e| IoError::Document {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| IoError::Document {
        path: ".".into(),
        message: e.to_string(),
    })?;
    level.validate()?;
    Ok(level)
}

/// Pretty-printed JSON; `parse_level` reads it back unchanged.
pub fn level_to_json(level: &Level) -> String {
    let mut s = serde_json::to_string_pretty(level).expect("levels always serialize");
    s.push('\n');
    s
}

pub fn read_level(path: &Path) -> Result<Level, IoError> {
    let text = fs::read_to_string(path).map_err(|e| file_error(path, e))?;
    parse_level(&text).map_err(|e| match e {
        IoError::Document { path: key, message } => IoError::File {
            path: path.to_path_buf(),
            message: format!("{key}: {message}"),
        },
        IoError::Invalid(err) => IoError::File {
            path: path.to_path_buf(),
            message: format!("invalid level: {err}"),
        },
        other => other,
    })
}

pub fn write_level(path: &Path, level: &Level) -> Result<(), IoError> {
    fs::write(path, level_to_json(level)).map_err(|e| file_error(path, e))
}

pub(crate) fn file_error(path: &Path, e: std::io::Error) -> IoError {
    IoError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}
