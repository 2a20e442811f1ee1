//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A mathematical precondition on an argument was violated
    /// (out-of-range exponent, non-positive window, empty interval, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural parameter error (inconsistent arc cutoffs, bad grid
    /// specification, malformed ratio description, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The prime table does not cover the requested range.
    #[error("prime table too small: need primes up to {needed}, table covers {limit}")]
    TableTooSmall { needed: u64, limit: u64 },

    /// A configured resource cap (memory, candidate count) would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A quadrature failed to reach the requested tolerance. The best
    /// estimate and the achieved bound are carried so callers can still use
    /// (and annotate) the result.
    #[error("tolerance not achieved: requested {requested:.3e}, achieved {achieved:.3e}")]
    Tolerance {
        requested: f64,
        achieved: f64,
        /// Best available estimate (real part).
        value: f64,
        /// Best available estimate (imaginary part, 0 for real integrals).
        value_im: f64,
    },

    /// Working precision was exhausted before the requested output could be
    /// certified (continued-fraction quotients of an uncertain input, ...).
    #[error("precision exhausted: {0}")]
    Precision(String),

    /// Malformed configuration text or an unknown key.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or truncated binary cache file.
    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
