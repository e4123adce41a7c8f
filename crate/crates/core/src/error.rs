use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vertex {vertex} out of range for graph on {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A vertex of H_1 has neither a low-degree witness nor a short cycle in
    /// its witness ball. The surgery parameters are inconsistent with the guest.
    #[error("claim violated at vertex {vertex}: ball of radius {radius} is regular and has no cycle of length <= {max_cycle_length}")]
    ClaimViolated {
        vertex: usize,
        radius: usize,
        max_cycle_length: usize,
    },

    #[error("vertex {vertex} is farther than {limit} from every low-degree vertex")]
    UnreachableVertex { vertex: usize, limit: usize },

    #[error("zone layout needs {needed} host vertices but only {available} exist (deficit {})", needed - available)]
    Capacity { needed: usize, available: usize },

    #[error("independent set has {size} vertices, above the bound {bound:.3}")]
    IndependentSetTooLarge { size: usize, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
