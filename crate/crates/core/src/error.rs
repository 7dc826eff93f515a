use thiserror::Error;

/// Failures of the algebraic and estimation routines.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian")]
    NotHermitian,

    #[error("preparation and encoding Hamiltonians commute; the criticality parameter is undefined")]
    CommutingPair,

    #[error("algebraic criterion violated (relative residual {residual:e})")]
    ConditionViolated { residual: f64 },

    #[error("proportionality constant is negative ({delta})")]
    NegativeDelta { delta: f64 },

    #[error("model parameters lie outside the normal phase")]
    OutOfPhase,

    #[error("enhancement ratio is undefined for the vacuum probe")]
    VacuumProbe,

    #[error("no sign change of R - 1 over [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("finite-difference step {0} outside [1e-6, 1e-2]")]
    InvalidStep(f64),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
