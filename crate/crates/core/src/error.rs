use thiserror::Error;

/// Errors surfaced by validation, the distillation pipeline, and channel
/// synthesis. Each variant names the violated invariant.
#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "NotHermitian: entry ({i},{j}) deviates from the conjugate transpose by {deviation:.3e}"
    )]
    NotHermitian { i: usize, j: usize, deviation: f64 },

    #[error("NotPSD: {detail}")]
    NotPsd { detail: String },

    #[error("TraceNotOne: trace = {trace}")]
    TraceNotOne { trace: f64 },

    #[error("InvalidDistribution: {detail}")]
    InvalidDistribution { detail: String },

    #[error("InvalidPureState: {detail}")]
    InvalidPureState { detail: String },

    #[error("InvalidPermutation: {detail}")]
    InvalidPermutation { detail: String },

    #[error("InvalidProjector: {detail}")]
    InvalidProjector { detail: String },

    #[error("DimensionMismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("DimensionOverflow: product dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("NotPure: projected state has purity {purity} (deviation {deviation:.3e})")]
    NotPure { purity: f64, deviation: f64 },

    #[error("ZeroWeight: Tr(P rho P) = {weight:.3e} is below tolerance")]
    ZeroWeight { weight: f64 },

    #[error(
        "CliqueVerificationFailed: indices {i} and {j} share a saturation component \
         but A[{i}][{j}] = {value} is not saturated"
    )]
    CliqueVerificationFailed { i: usize, j: usize, value: f64 },

    #[error("NotDistillable: candidate class {{{indices:?}}} yields an incoherent pure state")]
    NotDistillable { indices: Vec<usize> },

    #[error("NotMajorized: the source dephasing is not majorized by the target dephasing")]
    NotMajorized,

    #[error("NotTransformable: no strictly incoherent channel maps the state to the target")]
    NotTransformable,

    #[error("NotStrictlyIncoherent: {detail}")]
    NotStrictlyIncoherent { detail: String },

    #[error("IncompleteChannel: sum of K^dag K deviates from identity by {deviation:.3e}")]
    IncompleteChannel { deviation: f64 },

    #[error("EmptyChannel: a channel needs at least one Kraus operator")]
    EmptyChannel,

    #[error("Parse: {detail}")]
    Parse { detail: String },
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse {
            detail: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
