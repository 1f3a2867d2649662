use std::path::PathBuf;

/// Crate-wide error type. Every variant maps to a stable machine-readable
/// code via [`Error::code`], which the CLI prints on its diagnostic stream.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid box: {reason} (l={l}, t={t}, r={r}, b={b})")]
    InvalidBox {
        reason: &'static str,
        l: f64,
        t: f64,
        r: f64,
        b: f64,
    },

    #[error("invalid size: {reason} (w={w}, h={h})")]
    InvalidSize { reason: &'static str, w: f64, h: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("score {score} outside [0, 1] ({context})")]
    ScoreOutOfRange { score: f64, context: String },

    #[error("instance {id}: {source}")]
    Instance {
        id: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("covariance is not symmetric positive semi-definite: {0}")]
    NotPsd(&'static str),

    #[error("matrix inversion failed: {0}")]
    Singular(&'static str),

    #[error("instance id sets differ: {0}")]
    IdMismatch(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("dangling reference: {0}")]
    DanglingReference(String),

    #[error("duplicate id: {0}")]
    DuplicateId(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidBox { .. } => "data.box",
            Error::InvalidSize { .. } => "data.size",
            Error::InvalidConfig(_) => "config.invalid",
            Error::EmptyInput(_) => "data.empty",
            Error::ScoreOutOfRange { .. } => "data.score-range",
            Error::Instance { source, .. } => source.code(),
            Error::NotPsd(_) => "numeric.not-psd",
            Error::Singular(_) => "numeric.singular",
            Error::IdMismatch(_) => "data.id-mismatch",
            Error::Schema { .. } => "data.schema",
            Error::DanglingReference(_) => "data.dangling-reference",
            Error::DuplicateId(_) => "data.duplicate-id",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
