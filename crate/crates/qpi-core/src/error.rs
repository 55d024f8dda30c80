use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation point lies outside the system's domain.
    #[error("domain violation: {0}")]
    Domain(String),

    /// Amplitude magnitude fell below the nodal rejection threshold; the
    /// kinetic ratio is unreliable there and the caller must resample.
    #[error("nodal point: |psi| below threshold at {0:?}")]
    NodalPoint(Vec<f64>),

    #[error("config error: {0}")]
    Config(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    /// Training produced a non-finite loss.
    #[error("training diverged at epoch {epoch}")]
    Divergence { epoch: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
