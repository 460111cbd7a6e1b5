use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = KqiError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum KqiError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("citation cycle detected: {}", .ids.join(" -> "))]
    Cycle { ids: Vec<String> },

    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: String, dst: String },

    #[error("self-loop on node {0}")]
    SelfLoop(String),

    #[error("node id {0:?} is reserved")]
    ReservedId(String),

    #[error("unknown node id {0:?}")]
    UnknownNode(String),

    #[error("invalid edge weight {weight} on {src} -> {dst}")]
    InvalidWeight { src: String, dst: String, weight: f64 },

    #[error("graph already carries a super root")]
    AlreadyAugmented,

    #[error("graph has no super root; augment it first")]
    NotAugmented,

    #[error("node {0} has no publication year")]
    MissingYear(String),

    #[error("reference year {reference} precedes latest publication year {latest}")]
    ReferenceTimeTooEarly { reference: i32, latest: i32 },

    #[error("invalid decay rate {0}")]
    InvalidDecay(f64),

    #[error("node {0} has zero weighted in-strength")]
    ZeroInStrength(String),

    #[error("table does not match graph (expected {expected_nodes} nodes / W={expected_weight}, got {found_nodes} / W={found_weight})")]
    MismatchedTable {
        expected_nodes: usize,
        expected_weight: f64,
        found_nodes: usize,
        found_weight: f64,
    },

    #[error("fragment decomposition exceeds {limit} fragments")]
    FragmentExplosion { limit: usize },

    #[error("unknown group kind {0:?}")]
    UnknownGroupKind(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("every KQI value is zero")]
    AllZero,

    #[error("power iteration did not converge within {iterations} iterations")]
    Nonconvergence { iterations: usize },

    #[error("key sets differ: {0}")]
    KeyMismatch(String),

    #[error("validity guard failed: {0}")]
    ValidityGuard(String),

    #[error("selection is empty")]
    EmptySelection,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl KqiError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        KqiError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<csv::Error> for KqiError {
    fn from(e: csv::Error) -> Self {
        KqiError::Serialize(e.to_string())
    }
}

impl From<serde_json::Error> for KqiError {
    fn from(e: serde_json::Error) -> Self {
        KqiError::Serialize(e.to_string())
    }
}
