use thiserror::Error;

/// Every failure the library can report.
///
/// [`Error::Inconsistency`] is special: it is raised only when a result that
/// is mathematically guaranteed fails to materialize, and the CLI maps it to
/// exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("member {index} is empty")]
    EmptySet { index: usize },

    #[error("members {first} and {second} are the same set")]
    DuplicateSet { first: usize, second: usize },

    #[error("point {point} of member {index} is outside the universe 0..{universe}")]
    PointOutOfUniverse { index: usize, point: u32, universe: u32 },

    #[error("query set must be nonempty")]
    EmptyQuery,

    #[error("{0} is not a proper set of the family")]
    NotProper(String),

    #[error("member {index} is empty and cannot be hit")]
    UnhittableMember { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("arithmetic overflow while evaluating {0}")]
    Overflow(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
