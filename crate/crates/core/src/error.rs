use std::fmt;

use crate::report::ConditionReport;

/// The way a candidate relation fails to be a partial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderViolation {
    NotReflexive(String),
    NotAntisymmetric(String, String),
    NotTransitive(String, String, String),
}

impl fmt::Display for OrderViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderViolation::NotReflexive(a) => write!(f, "{a} ≤ {a} is missing"),
            OrderViolation::NotAntisymmetric(a, b) => {
                write!(f, "{a} ≤ {b} and {b} ≤ {a} for distinct elements")
            }
            OrderViolation::NotTransitive(a, b, c) => {
                write!(f, "{a} ≤ {b} and {b} ≤ {c} but not {a} ≤ {c}")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("not a partial order: {0}")]
    NotAPartialOrder(OrderViolation),
    #[error("elements {0} and {1} have no least upper bound")]
    MissingJoin(String, String),
    #[error("no bottom element")]
    NoBottom,
    #[error("no top element")]
    NoTop,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit { what: String, cap: usize },
    #[error("not a sup-preserving map: {0}")]
    NotSupMap(String),
    #[error("not a multimorphism: {0}")]
    NotAMultimorphism(String),
    #[error("not a quantale: {0}")]
    NotAQuantale(String),
    #[error("not an involution: {0}")]
    NotAnInvolution(String),
    #[error("image is not closed under composition: {0} ∘ {1} leaves it")]
    NotCompositionClosed(String, String),
    #[error("missing involution on {0}")]
    MissingInvolution(String),
    #[error("pair conditions failed:\n{0}")]
    ConditionsFailed(Box<ConditionReport>),
    #[error("invalid Morita context:\n{0}")]
    ContextInvalid(Box<ConditionReport>),
    #[error("star on {side} is not well defined: {first} and {second} have equal operators but distinct starred operators")]
    StarNotWellDefined {
        side: String,
        first: String,
        second: String,
    },
    #[error("action on {0} is not well defined: {1}")]
    ActionNotWellDefined(String, String),
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn resource(what: impl Into<String>, cap: usize) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            cap,
        }
    }

    /// True for errors caused by malformed input files rather than failed checks.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Format { .. } | Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
