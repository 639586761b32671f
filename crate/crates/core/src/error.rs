use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant corresponds to a violated precondition; nothing here is
/// recoverable by retrying with the same inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision exhausted: need {needed} p-adic digits, have {available}")]
    PrecisionExhausted { needed: i64, available: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular curve: discriminant is zero")]
    SingularCurve,

    #[error("point is not on the curve")]
    NotOnCurve,

    #[error("local height at p = {prime} is not supported: the point has singular reduction there")]
    UnsupportedReduction { prime: String },

    #[error("root refinement failed: {0}")]
    RootRefinement(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("assumptions fail: {0}")]
    Assumptions(String),

    #[error("could not factor {0} within the search budget")]
    Factorization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
