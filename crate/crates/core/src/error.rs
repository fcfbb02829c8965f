use thiserror::Error;

/// Errors raised by the grids, solvers and experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("CFL condition violated: courant number {courant:.4} > 1 ({context})")]
    Cfl { courant: f64, context: String },

    #[error("non-finite value in {what} at step {step} (t = {time})")]
    NonFinite {
        step: u64,
        time: f64,
        what: String,
    },

    #[error("refinement cap of {levels} levels reached at t = {time}")]
    RefinementCap { levels: usize, time: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
