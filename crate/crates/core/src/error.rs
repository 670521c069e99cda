use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("edge #{index} ({u}, {v}): self-loop")]
    SelfLoop { index: usize, u: usize, v: usize },

    #[error("edge #{index} ({u}, {v}): duplicate of an earlier edge")]
    DuplicateEdge { index: usize, u: usize, v: usize },

    #[error("edge #{index} ({u}, {v}): node index out of range for n = {n}")]
    EdgeOutOfRange { index: usize, u: usize, v: usize, n: usize },

    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("coupling or field is not finite at {what}")]
    NonFinite { what: String },

    #[error("query node {query} is not in the region")]
    QueryNotInRegion { query: usize },

    #[error("node {node} appears twice in the region")]
    DuplicateRegionNode { node: usize },

    #[error("connected component of node {node} has {size} nodes, brute-force cap is {cap}")]
    ComponentTooLarge { node: usize, size: usize, cap: usize },

    #[error("elimination induces a clique of {clique} variables, cap is {cap}")]
    WidthTooLarge { clique: usize, cap: usize },

    #[error("node {node}: {count} sign patterns to enumerate exceeds the cap of {cap} variables")]
    EnumerationCap { node: usize, count: usize, cap: usize },

    #[error("mean field did not converge after {iterations} sweeps (residual {residual:e})")]
    MeanFieldNotConverged { iterations: usize, residual: f64 },

    #[error("Dobrushin condition violated: c = {c} (need 0 <= c < 1)")]
    DobrushinViolated { c: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
