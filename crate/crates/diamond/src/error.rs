use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: pivot magnitude {pivot:.3e} below tolerance {tolerance:.3e}")]
    SingularMatrix { pivot: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid coupling graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate transmission: {0}")]
    DegenerateTransmission(String),

    #[error("time-domain integration diverged: state magnitude reached {0:.3e}")]
    UnstableIntegration(f64),

    #[error("unknown figure id: {0}")]
    UnknownFigure(String),

    #[error("config parse error: {0}")]
    ParseError(String),

    #[error("config validation error: {0}")]
    ValidationError(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
