use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("regularized system is numerically singular")]
    SingularSystem,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sample weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("batch-norm statistics were not fitted for this layer")]
    StatsNotFitted,

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("label column {0} not found")]
    MissingLabelColumn(String),
    #[error("labels contain a single class ({0:?}); at least two are required")]
    SingleClass(String),
    #[error("class {class} has {count} members, need at least {required}")]
    ClassTooSmall {
        class: String,
        count: usize,
        required: usize,
    },
    #[error("training targets contain no sample of class {0}")]
    ClassAbsent(usize),

    #[error("invalid hyperparameter {name}: {message}")]
    InvalidHyperParam { name: &'static str, message: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("depth {depth} out of range 1..={layers}")]
    DepthOutOfRange { depth: usize, layers: usize },
    #[error("model format version {found:?} is not supported (expected \"1\")")]
    FormatVersionMismatch { found: String },
    #[error("invalid model file: {0}")]
    InvalidModel(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("accuracy matrix is incomplete: {0}")]
    IncompleteMatrix(String),
    #[error("only {0} non-zero paired differences; at least 5 are required")]
    TooFewPairs(usize),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the input data rather than configuration
    /// or numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::MissingLabelColumn(_)
                | Error::SingleClass(_)
                | Error::ClassTooSmall { .. }
                | Error::ClassAbsent(_)
                | Error::DimensionMismatch(_)
                | Error::EmptyMatrix
                | Error::File { .. }
                | Error::Io(_)
                | Error::FormatVersionMismatch { .. }
                | Error::InvalidModel(_)
                | Error::Json(_)
                | Error::LengthMismatch { .. }
                | Error::IncompleteMatrix(_)
                | Error::TooFewPairs(_)
        )
    }

    /// True for failures of the linear algebra.
    pub fn is_numeric_error(&self) -> bool {
        matches!(self, Error::SingularSystem | Error::NegativeWeight { .. })
    }
}
