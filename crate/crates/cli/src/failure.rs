use std::fmt;
use std::path::Path;

use axiometer::Error;

/// A command failure, carrying its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input. Exit 2.
    Parse(String),
    /// Bad flags or rule settings. Exit 3.
    Config(String),
    /// A sweep in which no file parsed. Exit 4.
    EmptyCorpus(String),
    Other(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Config(_) => 3,
            Failure::EmptyCorpus(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    /// An input file that could not be read.
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Parse(format!("{}: {e}", path.display()))
    }

    /// Classifies a library error, prefixing `context` (usually the path).
    pub fn from_core(context: &str, e: &Error) -> Self {
        let message = match e.line() {
            Some(line) => format!("{context}:{line}: {}", e.root()),
            None => format!("{context}: {e}"),
        };
        match e.root() {
            Error::Config(_) => Failure::Config(message),
            Error::UnknownCandidate(_)
            | Error::InvalidRoster(_)
            | Error::DuplicateInBallot { .. }
            | Error::InvalidWeight(_)
            | Error::EmptyProfile
            | Error::Malformed(_) => Failure::Parse(message),
            _ => Failure::Other(message),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(m) | Failure::Config(m) | Failure::EmptyCorpus(m) | Failure::Other(m) => f.write_str(m),
        }
    }
}
