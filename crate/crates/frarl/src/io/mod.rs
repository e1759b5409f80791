//! Text file formats. Every reader reports the line (and, where it
//! applies, the column) of the first problem it meets.

pub mod checkpoint;
pub mod config;
pub mod metrics;
pub mod report;
pub mod scenario;
pub mod trajectory;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{location}: {message}")]
    Parse { location: Location, message: String },
}

/// Where a parse error occurred.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Location {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub column: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{}:", file.display())?;
        }
        write!(f, "line {}", self.line)?;
        if let Some(c) = &self.column {
            write!(f, ", column {c}")?;
        }
        Ok(())
    }
}

impl FormatError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse { location: Location { line, ..Location::default() }, message: message.into() }
    }

    pub(crate) fn at_column(line: usize, column: &str, message: impl Into<String>) -> Self {
        FormatError::Parse {
            location: Location { line, column: Some(column.to_string()), ..Location::default() },
            message: message.into(),
        }
    }

    /// Attaches the file name to a parse error.
    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            FormatError::Parse { mut location, message } => {
                location.file = Some(path.to_path_buf());
                FormatError::Parse { location, message }
            }
            other => other,
        }
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

pub fn write_string(path: &Path, text: &str) -> Result<(), FormatError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, text).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

/// Exact text form of a float: the 16 hex digits of its bit pattern.
pub(crate) fn hex(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

pub(crate) fn parse_hex(s: &str) -> Option<f64> {
    (s.len() == 16).then(|| u64::from_str_radix(s, 16).ok().map(f64::from_bits)).flatten()
}
