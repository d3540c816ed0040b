use std::fmt;

use crate::tnorm::TNorm;

/// A syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SourceError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SourceError { line: line.max(1), column: column.max(1), message: message.into() }
    }
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SourceError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] SourceError),

    #[error("invalid ontology: {0}")]
    InvalidOntology(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("the ontology is inconsistent under the {0} t-norm")]
    Inconsistent(TNorm),

    #[error("{operation} is not supported under the {tnorm} t-norm")]
    Unsupported { operation: &'static str, tnorm: TNorm },

    #[error("threshold answering under the {0} t-norm needs an explicit consistency assumption")]
    ConsistencyNotAssumed(TNorm),

    #[error("threshold must be strictly positive")]
    ZeroThreshold,

    #[error("expected a tuple of {expected} individual(s), got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("axiom `{axiom}` is not applicable to atom `{atom}`")]
    NotApplicable { axiom: String, atom: String },

    #[error("atoms `{0}` and `{1}` do not unify")]
    NotUnifiable(String, String),

    #[error("search space cap of {0} nodes exceeded")]
    SearchCapExceeded(u64),

    #[error("invalid grid step {0}: expected 1/q for a positive integer q")]
    InvalidStep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
