use std::path::PathBuf;

use thiserror::Error;

use crate::faim::ScoreClass;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty distribution")]
    EmptyDistribution,

    #[error("unnormalized input: score {0} lies outside [0, 1]")]
    UnnormalizedInput(f64),

    #[error("invalid grid: stepsize {0} must be positive and divide [0, 1] into whole bins")]
    InvalidGrid(f64),

    #[error("grid mismatch: {0} bins vs {1} bins")]
    GridMismatch(usize, usize),

    #[error("histogram has {got} bins but its grid has {expected}")]
    BinCount { expected: usize, got: usize },

    #[error("histogram is not normalized (total mass {0})")]
    NotNormalized(f64),

    #[error("negative or non-finite mass {0}")]
    InvalidMass(f64),

    #[error("source distribution has zero mass")]
    ZeroMassSource,

    #[error("interpolation parameter {0} outside [0, 1]")]
    InvalidInterpolation(f64),

    #[error("invalid barycenter weights: {0}")]
    InvalidWeights(String),

    #[error("invalid theta weights ({a}, {b}, {c}): each must be in [0, 1] and sum to 1")]
    InvalidTheta { a: f64, b: f64, c: f64 },

    #[error("degenerate class: {class} class is empty in group(s) {}", groups.join(", "))]
    DegenerateClass { class: ScoreClass, groups: Vec<String> },

    #[error("group {0:?} has no members")]
    EmptyGroup(String),

    #[error("unknown group {0:?}")]
    UnknownGroup(String),

    #[error("no theta weights given for group {0:?}")]
    MissingTheta(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid model file, line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("nonpositive group total")]
    NonPositiveTotal,

    #[error("positive count {positives} exceeds group total {total}")]
    PositivesExceedTotal { positives: u64, total: u64 },

    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),

    #[error("undefined ratio: {0}")]
    Undefined(String),

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
