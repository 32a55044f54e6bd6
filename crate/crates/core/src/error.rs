use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Division by zero, zero divisors, and other arithmetic domain violations.
    #[error("domain error: {0}")]
    Domain(String),

    /// A p-adic quantity could not be resolved at the working precision.
    /// Callers are expected to retry with more precision.
    #[error("precision exhausted: {0}")]
    Precision(String),

    /// The additive character was evaluated deeper than the session's root-of-unity field allows.
    #[error("additive character depth {needed} exceeds session depth {available}")]
    Depth { needed: u32, available: u32 },

    #[error("level error: {0}")]
    Level(String),

    #[error("truncation orders differ ({left} vs {right}); truncate first")]
    TruncationMismatch { left: usize, right: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("validation failed: {0}")]
    Validation(String),

    /// An enumeration or level search exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Results at consecutive levels disagreed up to the level budget.
    #[error("no stabilization: {0}")]
    Stabilization(String),
}
