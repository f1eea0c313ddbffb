use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("superluminal rotation: |omega| R = {0} is not below 1")]
    Superluminal(f64),
    #[error("history gap: retarded time {0} is not covered by the omega history")]
    HistoryGap(f64),
    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("numerical blow-up at t = {t}: {what}")]
    Blowup { t: f64, what: String },
    #[error("nonlinear solve failed at step {step}: {reason}")]
    SolveFailed { step: usize, reason: String },
    #[error("iteration diverged: {0}")]
    Diverged(String),
    #[error("insufficient decay data: {0}")]
    InsufficientDecay(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

pub(crate) fn require(cond: bool, name: &'static str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(name, reason))
    }
}
