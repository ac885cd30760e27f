use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single broken instance invariant, located by edge or variable index
/// (0-based, in the order the parts were supplied).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyInstance,
    EmptyDomain { var: usize },
    UnaryCount { expected: usize, found: usize },
    UnaryLength { var: usize, expected: usize, found: usize },
    SelfLoop { edge: usize },
    EndpointOrder { edge: usize },
    EndpointOutOfRange { edge: usize, var: usize },
    DuplicateEdge { edge: usize, first: usize },
    TableLength { edge: usize, expected: usize, found: usize },
    NonFiniteCost { var: Option<usize>, edge: Option<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyInstance => write!(f, "instance has no variables"),
            Violation::EmptyDomain { var } => write!(f, "empty domain at variable {var}"),
            Violation::UnaryCount { expected, found } => {
                write!(f, "expected {expected} unary tables, found {found}")
            }
            Violation::UnaryLength { var, expected, found } => write!(
                f,
                "unary table of variable {var} has {found} entries, expected {expected}"
            ),
            Violation::SelfLoop { edge } => write!(f, "self-loop at edge {edge}"),
            Violation::EndpointOrder { edge } => {
                write!(f, "edge {edge} endpoints not in ascending order")
            }
            Violation::EndpointOutOfRange { edge, var } => {
                write!(f, "edge {edge} references unknown variable {var}")
            }
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "duplicate edge at {edge} (first seen at edge {first})")
            }
            Violation::TableLength { edge, expected, found } => write!(
                f,
                "dimension mismatch at edge {edge}: {found} entries, expected {expected}"
            ),
            Violation::NonFiniteCost { var: Some(v), .. } => {
                write!(f, "non-finite unary cost at variable {v}")
            }
            Violation::NonFiniteCost { edge: Some(e), .. } => {
                write!(f, "non-finite binary cost at edge {e}")
            }
            Violation::NonFiniteCost { .. } => write!(f, "non-finite cost"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A state-space or size guard tripped.
    #[error("guard: {0}")]
    Guard(String),

    #[error("numeric: {0}")]
    Numeric(String),

    /// A caller broke an operation's precondition.
    #[error("contract: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
