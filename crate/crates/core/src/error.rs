use thiserror::Error;

/// Errors raised by walker construction, evolution and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("position {position} lies outside the lattice [-{t_max}, {t_max}]")]
    PositionOutOfBounds { position: i64, t_max: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("lattice capacity mismatch: {left} vs {right}")]
    CapacityMismatch { left: usize, right: usize },

    #[error("walker support touches the lattice boundary at |x| = {t_max}; increase t_max")]
    BoundaryContact { t_max: usize },

    #[error("two-particle lattice capacity must be at least 1")]
    ZeroCapacity,

    #[error("disorder degree p = {0} must lie in [0, 1]")]
    InvalidDisorderDegree(f64),

    #[error("phase map needs at least one step")]
    EmptyPhaseMap,

    #[error("step {step} is outside the phase map range 1..={steps}")]
    StepOutOfRange { step: usize, steps: usize },

    #[error("malformed phase map: {0}")]
    MalformedPhaseMap(String),

    #[error("negative quantum Fisher information {0} exceeds the numerical-noise threshold")]
    NegativeQfi(f64),

    #[error("finite-difference step h = {0} must lie in [1e-7, 1e-3]")]
    InvalidStepSize(f64),

    #[error("measurement count must be at least 1")]
    ZeroMeasurements,

    #[error("Fisher information must be nonnegative, got {0}")]
    NegativeFisherInformation(f64),

    #[error("power-law fit needs at least 3 usable points, found {found}")]
    TooFewPoints { found: usize },

    #[error("series value {value} at t = {t} is not positive")]
    NonPositiveValue { t: usize, value: f64 },

    #[error("fit window [{t_min}, {t_max}] does not fit a series of length {len}")]
    InvalidRange { t_min: usize, t_max: usize, len: usize },

    #[error("window width {width} is invalid for a series of length {len} (need 5 <= w < len)")]
    InvalidWindow { width: usize, len: usize },

    #[error("ensemble needs at least one map and one step")]
    EmptyEnsemble,

    #[error("ensemble member {index} (seed {seed:#018x}) failed: {source}")]
    Member {
        index: u64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("worker pool: {0}")]
    WorkerPool(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
