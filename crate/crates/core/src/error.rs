use thiserror::Error;

/// Errors raised by the library.
///
/// `BudgetExceeded` is deliberately distinct from every "no answer" outcome:
/// a search that ran out of nodes has proven nothing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("operation needs a nonempty generator")]
    EmptyGenerator,

    #[error("generators share the hyperbolic factor h({0},{1})")]
    SharedHyperbolic(u64, u64),

    #[error("target generator {0} has an edge labeled h")]
    HLabeledTarget(String),

    #[error("target generator {0} is not minimal for {1}")]
    NotMinimal(String, String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("verdict is not monotone in the scale parameter: {0}")]
    NotMonotone(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
