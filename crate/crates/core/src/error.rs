use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A frame layout that violates its structural invariants.
    #[error("invalid frame plan: {0}")]
    InvalidPlan(String),

    /// Exhaustive search refused because the candidate set is too large.
    #[error("search space of {candidates} candidates exceeds the limit of {limit}")]
    TooLarge { candidates: u128, limit: u128 },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Noise level below the range where the asymptotic theory is evaluated.
    #[error("theory out of range: kappa = {kappa} is below the supported floor {floor}")]
    TheoryOutOfRange { kappa: f64, floor: f64 },

    /// `p + H d` is not positive, so the asymptotic covariance does not exist.
    #[error("theory breakdown: p + H d = {denominator} is not positive")]
    TheoryBreakdown { denominator: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
