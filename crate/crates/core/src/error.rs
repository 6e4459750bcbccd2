use thiserror::Error;

/// Errors produced by schedule construction, analysis and bound evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NdError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid radio model: {0}")]
    InvalidRadio(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("hyper-period {hyperperiod} exceeds the configured budget ({budget})")]
    HyperperiodTooLarge { hyperperiod: u128, budget: u128 },
    #[error("beacon gap omega/beta = {omega}/{beta} is not an integer number of ticks")]
    NeedsFinerTicks { omega: u64, beta: String },
    #[error("reception periods differ: {left} vs {right}")]
    MisalignedPeriods { left: u64, right: u64 },
    #[error("{p1} and {p2} are not coprime")]
    NotCoprime { p1: u64, p2: u64 },
    #[error("invalid difference set: {0}")]
    InvalidDifferenceSet(String),
    #[error("tick arithmetic overflow: {0}")]
    HorizonOverflow(String),
    #[error("format error: {0}")]
    Format(String),
}

impl NdError {
    /// True for errors that reflect an unreachable parameter region rather
    /// than malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, NdError::Infeasible(_) | NdError::Domain(_) | NdError::NeedsFinerTicks { .. })
    }
}

pub type Result<T> = std::result::Result<T, NdError>;
