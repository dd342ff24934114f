use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numerical,
    Internal,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numerical => 4,
            ErrorCategory::Internal => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("degrees of freedom {nu} must exceed k - 1 = {}", *k as f64 - 1.0)]
    InvalidDegreesOfFreedom { nu: f64, k: usize },

    #[error("structure too large: {size} x {size} exceeds cap {cap}")]
    StructureTooLarge { size: usize, cap: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate chain: zero variance")]
    DegenerateChain,

    #[error("chain too short for ESS: {len} < {min}")]
    ChainTooShort { len: usize, min: usize },

    #[error("plug-in path requires balance: source sizes range from {min} to {max}")]
    Unbalanced { min: usize, max: usize },

    #[error("within-source scatter undefined with one fragment per source")]
    SingleFragmentSources,

    #[error("need at least 2 alternative sources, found {0}")]
    TooFewSources(usize),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("negative input to {what}: {value}")]
    NegativeInput { what: &'static str, value: f64 },

    #[error("provenance mismatch: {0}")]
    ProvenanceMismatch(String),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    ParseNumber {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("duplicate fragment key (source `{source_id}`, fragment {fragment})")]
    DuplicateFragment { source_id: String, fragment: usize },

    #[error("invalid fragment index `{value}` at row {row}")]
    FragmentIndex { row: usize, value: String },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("corrupt draw file at byte {offset}: {reason}")]
    CorruptDrawFile { offset: u64, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("sampler failed at iteration {iteration}: {source}")]
    Sampler {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("study cell (n = {n}, replicate {replicate}): {source}")]
    Study {
        n: usize,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Config(_) | InvalidSettings(_) | InvalidDegreesOfFreedom { .. } | Scenario(_) => {
                ErrorCategory::Config
            }
            MissingColumn(_)
            | ParseNumber { .. }
            | RowWidth { .. }
            | DuplicateFragment { .. }
            | FragmentIndex { .. }
            | CorruptDrawFile { .. }
            | Io { .. }
            | Csv(_)
            | EmptyInput(_)
            | TooFewSources(_)
            | Unbalanced { .. }
            | SingleFragmentSources
            | DimensionMismatch { .. } => ErrorCategory::Data,
            NotSymmetric { .. }
            | NotPositiveDefinite { .. }
            | NonFinite(_)
            | StructureTooLarge { .. }
            | DegenerateChain
            | ChainTooShort { .. }
            | NegativeInput { .. } => ErrorCategory::Numerical,
            ProvenanceMismatch(_) => ErrorCategory::Internal,
            Sampler { source, .. } | Study { source, .. } => source.category(),
        }
    }
}
