//! Error types shared across the crate.

use std::fmt;
use std::io;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, EvalError>;

/// Errors produced by score validation, metric computation, and file I/O.
#[derive(Debug)]
pub enum EvalError {
    /// A score collection was empty.
    EmptyInput,
    /// A score was NaN or infinite; carries the index of the first offender.
    NonFiniteScore { index: usize },
    /// Normalization bounds with `lo >= hi`.
    DegenerateBounds { lo: f64, hi: f64 },
    /// A threshold metric was asked for on scores outside `[0, 1]`;
    /// the caller skipped normalization.
    ScoresOutOfRange { index: usize, value: f64 },
    /// No threshold attains the requested rate constraint.
    ConstraintUnreachable { query: &'static str, level: f64 },
    /// An operation needs a score set that was not supplied.
    MissingDataset { what: &'static str },
    /// Unknown synthetic preset name.
    UnknownPreset { name: String },
    /// A parameter violated an operation's documented precondition.
    InvalidArgument { reason: String },
    /// A score file did not parse; line numbers are 1-based.
    Parse { line: usize, reason: String },
    /// Underlying I/O failure.
    Io(io::Error),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::EmptyInput => write!(f, "score set is empty"),
            EvalError::NonFiniteScore { index } => {
                write!(f, "non-finite score at index {index}")
            }
            EvalError::DegenerateBounds { lo, hi } => {
                write!(f, "degenerate normalization bounds: lo={lo} >= hi={hi}")
            }
            EvalError::ScoresOutOfRange { index, value } => write!(
                f,
                "score {value} at index {index} lies outside [0, 1]; normalize scores first"
            ),
            EvalError::ConstraintUnreachable { query, level } => {
                write!(f, "no threshold attains {query} >= {level}")
            }
            EvalError::MissingDataset { what } => write!(f, "missing dataset: {what}"),
            EvalError::UnknownPreset { name } => write!(f, "unknown preset '{name}'"),
            EvalError::InvalidArgument { reason } => write!(f, "invalid argument: {reason}"),
            EvalError::Parse { line, reason } => write!(f, "parse error at line {line}: {reason}"),
            EvalError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for EvalError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            EvalError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for EvalError {
    fn from(e: io::Error) -> Self {
        EvalError::Io(e)
    }
}
