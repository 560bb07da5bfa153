use thiserror::Error;

/// A single schema problem found while validating a JSON document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaIssue {
    /// JSON pointer to the offending value ("" is the document root).
    pub pointer: String,
    pub message: String,
}

impl std::fmt::Display for SchemaIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{p}: {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("inadmissible index: {0}")]
    Admissibility(String),
    #[error("invalid Newton polytope: {0}")]
    Polytope(String),
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("deck shift must be even, got ({dp}, {dq})")]
    OddShift { dp: i64, dq: i64 },
    #[error("five-term tuple degenerates (an entry is 0 or 1)")]
    DegenerateTuple,
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("degenerate family (a, b) = (0, 0)")]
    DegenerateFamily,
    #[error("odd branch integer {0}")]
    BranchParity(i64),
    #[error("point is not on the variational variety (residual {0:e})")]
    NotOnVariety(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("singular linear system")]
    SingularSystem,
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("schema validation failed ({} issue(s))", .0.len())]
    Schema(Vec<SchemaIssue>),
}

impl Error {
    /// True for errors caused by bad input (as opposed to numerical trouble).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NotOnVariety(_) | Error::InsufficientData(_) | Error::SingularSystem
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
