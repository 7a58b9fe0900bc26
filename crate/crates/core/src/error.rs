use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("need at least {required} nodes, got {count}")]
    TooFewNodes { count: usize, required: usize },

    #[error("nodes are not strictly increasing at index {index}")]
    NotIncreasing { index: usize },

    #[error("duplicate node at x = {x}")]
    DuplicateNode { x: f64 },

    #[error("non-finite input at index {index}")]
    NonFinite { index: usize },

    #[error("{nodes} nodes but {values} values")]
    LengthMismatch { nodes: usize, values: usize },

    #[error("rank deficient least-squares system at x = {x}: rank {rank}, need {required}")]
    RankDeficient { x: f64, rank: usize, required: usize },

    #[error("partition of unity leaves [{lo}, {hi}] uncovered")]
    CoverageGap { lo: f64, hi: f64 },

    #[error("subdomain {k} has {members} members, need more than {required}")]
    TooFewMembers { k: usize, members: usize, required: usize },

    #[error("no active subdomain at x = {x}")]
    Uncovered { x: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("determinant oracle limited to N <= {max_nodes} and d <= {max_degree}")]
    OracleLimits { max_nodes: usize, max_degree: usize },

    #[error("level {level}: {source}")]
    Level {
        level: u32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_level(self, level: u32) -> Error {
        Error::Level {
            level,
            source: Box::new(self),
        }
    }
}
