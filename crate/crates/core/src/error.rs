use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid node id {id}: graph has {node_count} nodes")]
    InvalidNode { id: usize, node_count: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("exact solver supports at most {cap} nodes, graph has {n}")]
    SolverCapExceeded { n: usize, cap: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("generation failed after {retries} attempts: {msg}")]
    Generation { retries: usize, msg: String },

    #[error("sampling: {0}")]
    Sampling(String),

    #[error("layout: {0}")]
    Layout(String),

    #[error("render: {0}")]
    Render(String),

    #[error("prompt configuration: {0}")]
    PromptConfig(String),

    #[error("config: {0}")]
    Config(String),

    #[error("auth failure: {0}")]
    AuthFailure(String),

    #[error("rate limit: retries exhausted after {retries} attempts")]
    RateLimitExhausted { retries: u32 },

    #[error("replay miss: no cached response for request {digest}")]
    ReplayMiss { digest: String },

    #[error("backend: {0}")]
    Backend(String),

    #[error("cannot score an unreachable pair ({u}, {v})")]
    UnreachablePair { u: usize, v: usize },

    #[error("empty record set")]
    EmptyRecords,

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
