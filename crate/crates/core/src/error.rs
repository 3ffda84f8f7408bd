use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input point is not on the unit sphere (|x| = {norm})")]
    NonUnitInput { norm: f64 },

    #[error("jet order {0} is not supported (maximum is 2)")]
    UnsupportedOrder(usize),

    #[error("point outside the field domain (|u| = {norm}, limit {limit})")]
    OutOfDomain { norm: f64, limit: f64 },

    #[error("kernel jet covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    SingularKernel { min_eigenvalue: f64 },

    #[error("conditioning block is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    #[error("unsupported class for this operation: {0}")]
    UnsupportedClass(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("discard rate {rate:.4} at d = {d} exceeds the limit {limit}")]
    ExcessiveDiscards { d: u32, rate: f64, limit: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateSample(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateSample(_))
    }
}
