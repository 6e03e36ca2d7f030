//! Error type and exit-code classification for the command-line tools.
//!
//! Failures fall into four classes, each with a stable process exit
//! code so scripts can react to *why* a command failed:
//!
//! | class                                   | exit code |
//! |-----------------------------------------|-----------|
//! | malformed or invalid documents          | 3         |
//! | a rule undefined on the given input     | 4         |
//! | filesystem problems                     | 5         |
//!
//! (Exit code 2 is used by the argument parser for usage errors, and a
//! failing check suite exits with 1.)

use std::path::PathBuf;

use credo_core::{Error as CoreError, ErrorCategory};

/// Exit code for malformed and invalid documents.
pub const EXIT_INVALID: i32 = 3;
/// Exit code for rules that are undefined on the given input.
pub const EXIT_UNDEFINED: i32 = 4;
/// Exit code for filesystem problems.
pub const EXIT_IO: i32 = 5;
/// Exit code for a suite run in which some check failed.
pub const EXIT_SUITE_FAILED: i32 = 1;

/// Any failure of a command-line operation.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The file is not syntactically valid TOML (or JSON where JSON is
    /// accepted).
    #[error("cannot parse {path}: {message}")]
    Parse {
        /// File being parsed.
        path: PathBuf,
        /// Parser diagnostics.
        message: String,
    },

    /// The file parsed but violates the document contract.
    #[error("invalid document {path}: {message}")]
    Validation {
        /// File being validated.
        path: PathBuf,
        /// What was violated.
        message: String,
    },

    /// The document's kind does not fit the requested operation.
    #[error("{context}: expected a {expected} document, found {found}")]
    KindMismatch {
        /// What was being attempted.
        context: String,
        /// Kind(s) the operation accepts.
        expected: String,
        /// Kind actually found.
        found: String,
    },

    /// A command invocation that does not make sense, such as an unknown
    /// rule name or an option that does not apply to the requested rule.
    #[error("{message}")]
    Usage {
        /// What was wrong with the invocation.
        message: String,
    },

    /// A belief-updating rule rejected the input.
    #[error("{0}")]
    Rule(#[from] CoreError),

    /// A pipeline step failed; carries the one-based step index.
    #[error("step {index} ({op}) failed: {source}")]
    Step {
        /// One-based position of the step in the pipeline.
        index: usize,
        /// The step's operation name.
        op: String,
        /// The underlying failure.
        #[source]
        source: Box<CliError>,
    },

    /// Reading or writing a file failed.
    #[error("cannot access {path}: {source}")]
    Io {
        /// The file involved.
        path: PathBuf,
        /// The underlying error.
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// The process exit code this failure class maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. }
            | CliError::Validation { .. }
            | CliError::KindMismatch { .. }
            | CliError::Usage { .. } => EXIT_INVALID,
            CliError::Rule(e) => match e.category() {
                ErrorCategory::RuleUndefined => EXIT_UNDEFINED,
                ErrorCategory::Validation => EXIT_INVALID,
            },
            CliError::Step { source, .. } => source.exit_code(),
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_failure_class() {
        let parse = CliError::Parse {
            path: "x.toml".into(),
            message: "bad".into(),
        };
        assert_eq!(parse.exit_code(), EXIT_INVALID);

        let undefined = CliError::Rule(CoreError::TotalConflict);
        assert_eq!(undefined.exit_code(), EXIT_UNDEFINED);

        let invalid = CliError::Rule(CoreError::FrameMismatch);
        assert_eq!(invalid.exit_code(), EXIT_INVALID);

        let io = CliError::Io {
            path: "missing.toml".into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "gone"),
        };
        assert_eq!(io.exit_code(), EXIT_IO);

        let step = CliError::Step {
            index: 2,
            op: "dempster_combine".into(),
            source: Box::new(CliError::Rule(CoreError::TotalConflict)),
        };
        assert_eq!(step.exit_code(), EXIT_UNDEFINED);
        assert!(step.to_string().contains("step 2"));
    }
}
