use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p must lie in (1, ∞), got {0}")]
    InvalidExponent(f64),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid conductivity field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("probe is not resolved by the mesh: tau * h = {0:.4} exceeds 0.5")]
    UnresolvedProbe(f64),

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("no convergence: {0}")]
    NotConverged(String),

    #[error("reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
