//! Error types shared across the library.

use thiserror::Error;

/// Errors produced by the linear algebra, sampling, trapdoor and scheme layers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// Operand shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Operands live over different moduli.
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    /// Serialized stream does not start with the expected magic bytes.
    #[error("bad magic in serialized stream")]
    BadMagic,

    /// Serialized stream carries a different kind byte than expected.
    #[error("unexpected record kind: got {got}, expected {expected}")]
    UnexpectedKind { got: u8, expected: u8 },

    /// Serialized stream ended before the declared payload.
    #[error("truncated serialized stream")]
    Truncated,

    /// Serialized value is malformed (entry out of range, inconsistent header).
    #[error("malformed serialized value: {0}")]
    Malformed(String),

    /// A file was produced under a different parameter set.
    #[error("parameter-set digest mismatch")]
    ParamsDigestMismatch,

    /// Trapdoor tag is not invertible mod q.
    #[error("trapdoor tag is not invertible mod q")]
    NonInvertibleTag,

    /// Gadget-lattice decoding left a residual outside the decoding radius.
    #[error("gadget decoding failure")]
    DecodingFailure,

    /// Parameter set fails a structural or functional requirement.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Equality-test decoding failed on one side.
    #[error("equality-test decode failure")]
    DecodeFailure,

    /// A bounded resampling loop ran out of attempts.
    #[error("internal error: {0}")]
    Internal(String),

    /// CPA distinguisher: neither candidate message satisfies the checks.
    #[error("neither candidate message matches the ciphertext")]
    NeitherMatches,

    /// Malformed caller input (wrong message length, bad hex, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
