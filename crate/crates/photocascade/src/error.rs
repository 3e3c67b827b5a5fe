use thiserror::Error;

/// Errors shared across the signal, lattice, device and pipeline layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("signals live on different grids: {0}")]
    GridMismatch(String),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("shifted field configuration {0:?} is not on the lattice")]
    OffLattice(Vec<i64>),

    #[error("table normalization broken after substitution: max deviation {max_dev:.3e} (ill-posed kernel/lattice pairing)")]
    NormalizationBroken { max_dev: f64 },

    #[error("source is moment-specified and cannot be sampled; use the analytic moment path")]
    NotSampleable,

    #[error("amplifier bandwidth precondition violated: {0}")]
    Bandwidth(String),

    #[error("negative flux {value} at bin {index}")]
    NegativeFlux { index: usize, value: f64 },

    #[error("ensemble is empty or too small: {0}")]
    EmptyEnsemble(String),

    #[error("record too short: {0}")]
    RecordTooShort(String),

    #[error("physics validation rejected the scenario: {0}")]
    PhysicsRejected(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
