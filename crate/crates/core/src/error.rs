use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid activation: {0}")]
    Activation(String),

    #[error("activation has no breakpoint; a purely linear activation cannot emulate ReLU")]
    NoKink,

    #[error("reachable pre-activation range is unbounded: {0}")]
    Unbounded(String),

    /// The sequence has (numerically) zero spread and cannot be standardized.
    #[error("degenerate constant signal (sigma = {sigma:e})")]
    DegenerateConstant { sigma: f64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
