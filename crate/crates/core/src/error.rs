use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("network generation failed (seed {seed}): {reason}")]
    Generation { seed: u64, reason: String },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("graph is disconnected: node {0} is unreachable")]
    Disconnected(usize),

    #[error("missing data: {0}")]
    MissingData(&'static str),

    #[error("embedding needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("eigen-solver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("node universe mismatch: ground truth has {truth} nodes, classification has {classified}")]
    UniverseMismatch { truth: usize, classified: usize },

    #[error("malformed graph file, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("message bound violated in phase {phase}: node {node} sent {sent} messages, limit {limit}")]
    MessageBound { phase: String, node: usize, sent: u32, limit: u32 },

    #[error("trial with seed {seed}: {source}")]
    Trial {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
