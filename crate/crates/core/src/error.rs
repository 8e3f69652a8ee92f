use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("singular matrix")]
    SingularMatrix,

    #[error("complex eigenvalues")]
    ComplexEigenvalues,

    #[error("defective matrix: repeated eigenvalue with a one-dimensional eigenspace")]
    Defective,

    #[error("parallel eigenvectors (|e1.e2| = {dot})")]
    ParallelEigenvectors { dot: f64 },

    #[error("letter {letter} outside alphabet of size {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },

    #[error("map {index} is not a contraction (alpha1 = {alpha1})")]
    NotContraction { index: usize, alpha1: f64 },

    #[error("map {index} is not entrywise positive ({entry} = {value})")]
    NotPositive {
        index: usize,
        entry: &'static str,
        value: f64,
    },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("empty stopping set")]
    EmptyStoppingSet,

    #[error("hull not invariant under map {index}")]
    HullNotInvariant { index: usize },

    #[error("enumeration budget exceeded: {needed} words needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: usize },

    #[error("dimension bracket [{lo}, {hi}] out of planar range (0, 2]")]
    OutOfPlanarRange { lo: f64, hi: f64 },

    #[error("non-negative Lyapunov exponent ({0})")]
    NonNegativeExponent(f64),

    #[error("cloud carries a single component label; no cross-component pairs")]
    SingleLabel,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("images do not fit: {0}")]
    PlacementFailed(String),

    #[error("configuration error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
