//! Error types shared across the crate.
//!
//! Domain violations never surface as NaN; every operation with a restricted
//! domain returns an explicit error instead.

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The input lies outside the mathematical domain of the operation
    /// (e.g. evaluating a function at its jump point or pole).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition on the input is violated
    /// (e.g. a discriminant with the wrong residue mod 4).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numerical result could not be certified to the requested accuracy
    /// (truncation order or cutoff too small); the message reports what is
    /// needed.
    #[error("numerical certification failed: {0}")]
    Certification(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
