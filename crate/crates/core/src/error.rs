use nalgebra::DMatrix;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain the model is defined on.
    #[error("parameter `{name}` out of domain: {detail}")]
    Domain { name: &'static str, detail: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The symmetric eigensolver gave up. The offending matrix is kept for diagnosis.
    #[error("eigensolver did not converge on a {}x{} matrix within {iterations} iterations", .matrix.nrows(), .matrix.ncols())]
    NoConvergence { matrix: Box<DMatrix<f64>>, iterations: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// An observable left its physically admissible range.
    #[error("integrity violation at step {step}: {quantity} = {value} outside [{lo}, {hi}]")]
    Integrity {
        step: usize,
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            name,
            detail: detail.into(),
        }
    }
}
