use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no edges")]
    NoEdges,

    #[error("node index {index} out of range for graph with {n_nodes} nodes")]
    NodeOutOfRange { index: usize, n_nodes: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate graph: no node of degree >= 2")]
    DegenerateGraph,

    #[error("more seeds than nodes ({requested} > {n_nodes})")]
    TooManySeeds { requested: usize, n_nodes: usize },

    #[error("undefined modularity: graph has no edges")]
    UndefinedModularity,

    #[error("stochastic block model requires an unweighted graph")]
    WeightedGraph,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate ranking: tie-corrected denominator is zero")]
    DegenerateRanking,

    #[error("degenerate partition for AUC: no community has both members and non-members")]
    DegeneratePartition,

    #[error("nothing to evaluate")]
    NothingToEvaluate,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
