use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),
    #[error("degenerate two-wavelet constant {0:e}; reconstruction refused")]
    DegenerateConstant(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("no bound applies: {0}")]
    NoApplicableBound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
