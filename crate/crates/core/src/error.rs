use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("step size control failed: {0}")]
    StepSize(String),
    #[error("time step too coarse: {0}")]
    StepTooLarge(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, NetError>;

impl From<std::io::Error> for NetError {
    fn from(e: std::io::Error) -> Self {
        NetError::Io(e.to_string())
    }
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(NetError::InvalidParameter(msg()))
    }
}
