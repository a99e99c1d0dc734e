use thiserror::Error;

/// Errors raised while building measures, generators and families, or while
/// evaluating distances between them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("indeterminate extended sum (+inf) + (-inf)")]
    Indeterminate,
    #[error("power index {alpha} is reserved for the logarithmic generators; use kl (alpha = 1) or rkl (alpha = 0)")]
    ReservedPowerIndex { alpha: f64 },
    #[error("generator check failed: {0}")]
    InvalidGenerator(String),
    #[error("measures live on different supports (sizes {left} and {right})")]
    SupportMismatch { left: usize, right: usize },
    #[error("measure is empty")]
    EmptyMeasure,
    #[error("mass at index {index} is {value}; masses must be finite and nonnegative")]
    InvalidMass { index: usize, value: f64 },
    #[error("measure has nonpositive total mass {total}")]
    ZeroTotal { total: f64 },
    #[error("probability measure expected but total mass is {total}")]
    NotNormalized { total: f64 },
    #[error("requires equivalent measures: scale mass vanishes at index {index} where the compared masses do not")]
    NotEquivalent { index: usize },
    #[error("mixture weight {beta} is outside [0, 1]")]
    InvalidMixtureWeight { beta: f64 },
    #[error("merge map: {0}")]
    InvalidMergeMap(String),
    #[error("parameter vector has length {found}, family dimension is {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("outside natural parameter domain: {0}")]
    OutsideDomain(String),
    #[error("interior natural parameter required: {0}")]
    NotInterior(String),
    #[error("formula outside validity domain at alpha = {alpha}: {reason}")]
    FormulaOutsideValidity { alpha: f64, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("oracle tolerance not met: achieved error estimate {achieved:e}, requested {requested:e}")]
    OracleTolerance { achieved: f64, requested: f64 },
    #[error("oracle integrand is not finite at x = {x}")]
    OracleNonFinite { x: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed input data rather than by a
    /// mathematically invalid request.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::SupportMismatch { .. }
                | Error::EmptyMeasure
                | Error::InvalidMass { .. }
                | Error::ZeroTotal { .. }
                | Error::NotNormalized { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidMergeMap(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
