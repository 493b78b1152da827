use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },

    #[error("no bound state in ({lo}, {hi})")]
    NoBoundState { lo: f64, hi: f64 },

    #[error("outside asymptotic regime: {0}")]
    OutOfRegime(String),

    #[error("grid needs about {needed_mb} MB, cap is {cap_mb} MB; raise max_memory_mb or coarsen the grid")]
    MemoryCap { needed_mb: u64, cap_mb: u64 },

    #[error("reduction invalid: {0}")]
    ReductionInvalid(String),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn conv(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NoConvergence { what, detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
