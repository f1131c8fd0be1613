use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("no generator tuple realizes row {entries:?} exactly")]
    NoExactRealization { entries: Vec<i64> },

    #[error("row list has {rows} rows, fewer than the {needed} required for a subset")]
    EmptySearch { rows: usize, needed: usize },

    #[error("enumeration finished without a non-singular, non-zero candidate")]
    NoCandidate,

    #[error("{what}: {size} exceeds the limit of {limit}")]
    ResourceGuard {
        what: &'static str,
        size: String,
        limit: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
