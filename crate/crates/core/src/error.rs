//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A tensor product would exceed the largest supported register.
    #[error("matrix dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    /// Operand shapes are inconsistent with the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Matrix entries must be finite (no NaN or infinity).
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    /// A scalar parameter fell outside its allowed range.
    #[error("{name} must lie in {range}, got {value}")]
    Domain {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    /// Requested a channel that is not in the catalogue.
    #[error("unknown channel '{0}'")]
    UnknownChannel(String),

    /// Kraus operators do not satisfy the completeness relation Σ EᵢᵀEᵢ = I.
    #[error("Kraus operators violate completeness (deviation {deviation:.3e})")]
    KrausCompleteness { deviation: f64 },

    /// An operator expected to be unitary is not.
    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    /// Measurement basis vectors are not orthonormal.
    #[error("basis vectors are not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    /// POVM elements do not resolve the identity on their support, or the
    /// measured state carries weight outside that support.
    #[error("POVM is not complete over the state's support (deviation {deviation:.3e})")]
    PovmIncomplete { deviation: f64 },

    /// A POVM element has a significantly negative eigenvalue.
    #[error(
        "POVM element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})"
    )]
    NotPositiveSemidefinite { index: usize, min_eigenvalue: f64 },

    /// Every branch of a stochastic operation has vanishing probability.
    #[error("all branch probabilities vanish; state is degenerate for this operation")]
    DegenerateBranches,

    /// Asked to collapse onto an outcome whose probability vanishes.
    #[error("outcome {0} has vanishing probability; cannot collapse onto it")]
    DegenerateOutcome(usize),
}
