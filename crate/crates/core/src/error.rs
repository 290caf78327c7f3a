use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {coordinate} has zero sample variance")]
    ZeroVariance { coordinate: usize },

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("exhaustive search over {n} variables exceeds the cap of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("cannot embed K_{n}: capacity of this graph is {capacity}")]
    TooManyLogicalQubits { n: usize, capacity: usize },

    #[error("hardware mask breaks the clique embedding: {0}")]
    UnsupportedMask(String),

    #[error("embedding does not fit the problem: {0}")]
    EmbeddingMismatch(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error(
        "lambda bounds do not bracket target sparsity {target}: \
         sparsity(lo) = {lo_sparsity}, sparsity(hi) = {hi_sparsity}"
    )]
    BracketInvalid {
        target: f64,
        lo_sparsity: f64,
        hi_sparsity: f64,
    },

    #[error("need at least 3 points to fit, got {found}")]
    TooFewPoints { found: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Broad failure class, used by front ends to pick an exit status.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DimensionMismatch { .. }
            | Error::TooFewSamples { .. }
            | Error::Empty(_)
            | Error::NonFinite(_)
            | Error::IndexOutOfRange { .. }
            | Error::Parse { .. }
            | Error::InvalidArgument(_)
            | Error::Io { .. }
            | Error::Json(_) => ErrorKind::Data,
            Error::ZeroVariance { .. }
            | Error::TooLarge { .. }
            | Error::TooManyLogicalQubits { .. }
            | Error::UnsupportedMask(_)
            | Error::EmbeddingMismatch(_)
            | Error::BracketInvalid { .. }
            | Error::TooFewPoints { .. } => ErrorKind::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Numerical,
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
