use thiserror::Error;

/// Errors raised by profile construction, ingestion, rules and metrics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("candidate `{0}` is not in the roster")]
    UnknownCandidate(String),

    #[error("invalid candidate roster: {0}")]
    InvalidRoster(String),

    #[error("candidate `{candidate}` appears twice in one ballot")]
    DuplicateInBallot { candidate: String },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("profile has no voters (total weight must be positive)")]
    EmptyProfile,

    #[error("rankings are over different candidate sets")]
    RosterMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rule `{rule}` failed: {source}")]
    Rule {
        rule: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Self {
        Error::AtLine {
            line,
            source: Box::new(self),
        }
    }

    pub(crate) fn malformed(line: usize, message: impl Into<String>) -> Self {
        Error::Malformed(message.into()).at_line(line)
    }

    /// The line number attached to a parse error, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::AtLine { line, .. } => Some(*line),
            _ => None,
        }
    }

    /// The underlying error with any line annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            Error::Rule { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn in_rule(self, rule: &str) -> Self {
        Error::Rule {
            rule: rule.to_string(),
            source: Box::new(self),
        }
    }
}
