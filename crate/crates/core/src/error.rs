use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("vertex ordering is not a permutation of 0..{0}")]
    NotPermutation(usize),

    #[error("orientation contains a directed cycle")]
    Cyclic,

    #[error("arc set does not match the base graph: {0}")]
    ArcMismatch(String),

    #[error("graph has no edges; 1-density is undefined")]
    Edgeless,

    #[error("graph on {n} vertices exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("vertex counts differ: {0} vs {1}")]
    VertexCountMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex set is not independent: edge {0}-{1}")]
    NotIndependent(usize, usize),

    #[error("core vertex {0} has a singleton out-ball")]
    SingletonBall(usize),

    #[error("hitting-set sampling failed after {attempts} attempts: {detail}")]
    RetriesExhausted { attempts: usize, detail: String },

    #[error("graph has {edges} edges, needs at least {required} for the requested density")]
    DensityPrecondition { edges: usize, required: String },

    #[error("candidate pool too small at {step}: {available} available, need at least {required}")]
    PoolTooSmall {
        step: String,
        available: usize,
        required: String,
    },

    #[error("generator failed: {0}")]
    Generator(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
