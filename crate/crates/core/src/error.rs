use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation class count {count} exceeds the cap of {cap} (delta={delta}, h={h})")]
    ResourceCap {
        delta: usize,
        h: usize,
        count: u128,
        cap: usize,
    },

    #[error("truncation order {order} is too coarse to bracket the singularity; increase order")]
    IncreaseOrder { order: usize },

    #[error("dependency graph is not strongly connected: {0}")]
    NotStronglyConnected(String),

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
