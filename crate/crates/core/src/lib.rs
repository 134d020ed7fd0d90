//! Numerical companion library for the Nyman-Beurling approach to the zeta
//! function: exact Moebius/Vaughan arithmetic, continued-fraction machinery
//! with the Gauss map and its invariant measure, the Balazard-Martin analytic
//! layer (autocorrelation integral A, Wilton series), Vasyunin and cotangent
//! sums with three independent evaluators of the sawtooth series g, Gram
//! matrices of the Nyman-Beurling distance, and Moebius-cancellation sweeps.
//!
//! Everything that can be computed two ways is: the test suites pin the
//! conventions by cross-validation (series vs closed form vs quadrature).

pub mod arith;
pub mod contfrac;
pub mod experiments;
pub mod nyman;
pub mod sums;
pub mod wilton;

mod kahan;

pub use kahan::KahanSum;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A quadrature could not reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    /// A numeric computation failed (conditioning, positivity, convergence).
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A continued-fraction expansion ran out of depth or precision.
    #[error("depth exhausted: {0}")]
    DepthExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
