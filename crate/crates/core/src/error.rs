//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A row of an input file failed to parse.
    #[error("line {line}: {msg}")]
    MalformedRow { line: usize, msg: String },

    /// A raw value fell outside every configured bin of its attribute.
    #[error("value outside bins: column '{column}', value {value}")]
    ValueOutsideBins { column: String, value: f64 },

    /// Table schema and domain disagree (attribute order, names or counts).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Two objects built over different domains were combined.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// The Fourier strategy needs every cardinality to be a power of two.
    #[error("Fourier unavailable for this domain: {0}")]
    NonBinarizableDomain(String),

    /// A strategy that only understands marginal workloads got something else.
    #[error("workload is not a union of marginals: {0}")]
    NonMarginalWorkload(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The privacy probe found no histogram bin with enough mass on both sides.
    #[error("insufficient samples in every bin (need >= {min_count} on both sides)")]
    InsufficientSamples { min_count: usize },

    /// The privacy probe was pointed at a mechanism with noise disabled.
    #[error(
        "mechanism runs with noise disabled; deterministic outputs violate differential privacy"
    )]
    NonPrivateBypass,

    /// Incompatible experiment configuration.
    #[error("incompatible configuration: {0}")]
    IncompatibleConfig(String),

    /// Image codec failure, with the byte offset where decoding stopped.
    #[error("image format error at byte {offset}: {msg}")]
    ImageFormat { offset: usize, msg: String },

    /// Aggregator/node protocol violation.
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
