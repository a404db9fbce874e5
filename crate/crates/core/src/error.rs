use std::path::PathBuf;

use thiserror::Error;

use crate::graph::{FlipAction, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },

    #[error("node {node} has label {label}, outside [0, {class_count})")]
    LabelOutOfRange {
        node: NodeId,
        label: usize,
        class_count: usize,
    },

    #[error("node {node} has no label")]
    MissingLabel { node: NodeId },

    #[error("class count must be at least 2, got {0}")]
    TooFewClasses(usize),

    #[error("flip #{index} ({action:?} {u}-{v}) is not valid against the current graph")]
    InvalidFlip {
        index: usize,
        u: NodeId,
        v: NodeId,
        action: FlipAction,
    },

    #[error("node pair ({0}, {0}) is a self-loop")]
    SelfLoop(NodeId),

    #[error("attack class {0} equals the target's own class")]
    SameClass(usize),

    #[error("feature vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no successful {attack} attacks out of {attempted} targets")]
    NoSuccessfulAttacks { attack: String, attempted: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
