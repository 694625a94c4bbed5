use thiserror::Error;

/// Errors raised for malformed inputs and violated preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("state {state} out of range for an automaton with {n} states")]
    StateOutOfRange { state: usize, n: usize },

    #[error("letter {letter} out of range for an alphabet of size {k}")]
    LetterOutOfRange { letter: usize, k: usize },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("not a bijection: {0}")]
    NotBijection(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
