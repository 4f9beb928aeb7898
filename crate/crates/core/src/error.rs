use thiserror::Error;

use crate::dd::DdError;

/// Errors raised while reading or transforming an ensemble.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed node at {path}: {reason}")]
    MalformedNode { path: String, reason: String },
    #[error("non-finite {what} at {path}")]
    NonFinite { what: &'static str, path: String },
    #[error("feature index {feature} at {path} is out of range (num_features = {num_features})")]
    FeatureOutOfRange {
        feature: usize,
        num_features: usize,
        path: String,
    },
    #[error("ensemble contains no trees")]
    NoTrees,
    #[error("precision {0} is larger than the supported maximum of 9")]
    PrecisionTooLarge(u32),
    #[error("leaf value {value} does not fit a 64-bit integer at precision {precision}")]
    LeafOverflow { value: f64, precision: u32 },
    #[error("leaf values are not integral; quantize the ensemble before counting")]
    NotQuantized,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error("guard (feature {feature}, threshold {threshold}) is not in the guard table")]
    GuardNotInTable { feature: usize, threshold: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("brute-force enumeration needs {regions} regions, above the cap of {cap}")]
    OracleCapExceeded { regions: u128, cap: u128 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
