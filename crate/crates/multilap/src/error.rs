//! Crate-wide error type.

use crate::network::NodeLayerId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("asymmetric weight for edge {a} -- {b}: {first} vs {second}")]
    AsymmetricWeight {
        a: NodeLayerId,
        b: NodeLayerId,
        first: f64,
        second: f64,
    },

    #[error("self-loop on node {node} of layer {layer}")]
    SelfLoop { layer: usize, node: usize },

    #[error("node index {node} out of range for layer {layer} with {size} nodes")]
    NodeOutOfRange {
        layer: usize,
        node: usize,
        size: usize,
    },

    #[error("layer index {layer} out of range: network has {count} layers")]
    LayerOutOfRange { layer: usize, count: usize },

    #[error("layer {layer} declares zero nodes")]
    EmptyLayer { layer: usize },

    #[error("network has no layers")]
    EmptyNetwork,

    #[error("negative or non-finite weight {value} for {context}")]
    BadWeight { value: f64, context: String },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("matrix is not a valid Laplacian: {0}")]
    InvalidLaplacian(String),

    #[error("eigensolver did not converge: max off-diagonal {off_diagonal:.3e} after {rotations} rotations")]
    EigensolverFailure { off_diagonal: f64, rotations: usize },

    #[error("numerical failure at t = {t}: {message}")]
    Numerical { t: f64, message: String },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for input-validation failures (CLI exit code 1); false for
    /// runtime/numerical failures (exit code 2).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Numerical { .. } | Error::EigensolverFailure { .. } | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
