use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty set")]
    EmptySet,
    #[error("dimension limit exceeded: {0}")]
    DimensionLimit(String),
    #[error("point is not a member of the polyhedron (violation {0:e})")]
    NotMember(f64),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("set is bounded")]
    BoundedSet,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point is outside the domain")]
    NotInDomain,
    #[error("overflow: |value| = {0:e}")]
    Overflow(f64),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("domain unreachable in direction at rung {0}")]
    DomainUnreachable(usize),
    #[error("constraint {0} is not Lipschitz at infinity in this direction")]
    LipschitzPreconditionFailed(usize),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no samples with positive constraint value")]
    NoViolatingSamples,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }
}
