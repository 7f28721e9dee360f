use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite coordinate in row {row}")]
    NonFinite { row: usize },

    #[error("cannot parse `{value}` at line {line}")]
    Parse { line: usize, value: String },

    #[error("every feature has zero range")]
    ZeroRange,

    #[error("invalid IP range [{min}, {max}]")]
    InvalidRange { min: f64, max: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("need more than {k} points, got {n}")]
    TooFewPoints { n: usize, k: usize },

    #[error("degenerate distances: {0}")]
    DegenerateDistances(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("box-count fit is degenerate: every scale has the same count")]
    DegenerateFit,

    #[error("label raster contains a single class")]
    SingleClass,

    #[error("cache write failed: {0}")]
    CacheWrite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by the filesystem rather than by the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::CacheWrite(_))
    }
}
