use thiserror::Error;

/// Errors produced by the construction, verification and search routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("root must be parallel (tree is not 2-connected)")]
    NotTwoConnected,

    #[error("graph is not series-parallel reducible for terminals ({l}, {r}): {reason}")]
    NotSeriesParallel { l: usize, r: usize, reason: String },

    #[error("tree does not match graph: {0}")]
    TreeGraphMismatch(String),

    #[error("edge subset is not a spanning tree")]
    NotSpanningTree,

    #[error("brute-force cap exceeded: {what} = {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
