use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("no valid graph after {attempts} attempts (parameters are likely infeasible)")]
    GenerationFailed { attempts: u32 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("malformed graph file: {0}")]
    Malformed(String),

    #[error("hilbert space too large: {nodes} nodes exceeds the limit of {limit}")]
    DimensionOverflow { nodes: usize, limit: usize },

    #[error("color {color} does not exist at node {node} (degree {degree})")]
    InvalidColor {
        node: usize,
        color: usize,
        degree: usize,
    },

    #[error("cycle vectors live in different edge universes ({left} vs {right} edges)")]
    EdgeUniverseMismatch { left: usize, right: usize },

    #[error("cycle basis is empty (the graph is a tree), entropy is undefined")]
    EmptyBasis,

    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state does not match the graph: expected {expected} amplitudes, found {found}")]
    StateMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
