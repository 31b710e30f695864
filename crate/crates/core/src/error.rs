use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {what}")]
    NonFinite { what: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("missing demographics on observation {row} (question {question_id})")]
    MissingDemographics { row: usize, question_id: String },

    #[error("unknown {variable} level `{level}`")]
    UnknownLevel { variable: &'static str, level: String },

    #[error("responses contain a single class; the likelihood has no finite maximum")]
    SingleClass,

    #[error("design has {rows} rows but {cols} columns")]
    TooFewRows { rows: usize, cols: usize },

    #[error("complete or quasi-complete separation: coefficient norm {norm:.3} exceeded {limit}")]
    Separation { norm: f64, limit: f64 },

    #[error("information matrix is singular (rank deficient at column {column})")]
    RankDeficient { column: usize },

    #[error("cross-validation fold `{question_id}` failed: {source}")]
    Fold {
        question_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("run {index} failed: {source}")]
    Run {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("graph has {nodes} nodes; the process needs at least {needed}")]
    GraphTooSmall { nodes: usize, needed: usize },

    #[error("{path}: GML parse error at line {line}, column {column}: {message}")]
    Gml {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: edge endpoint {id} does not name a node")]
    DanglingEndpoint { path: String, id: String },

    #[error("{path}: line {line}: {message}")]
    EdgeList { path: String, line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema: {0}")]
    Schema(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short name for machine-readable error reports.
    pub fn category(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } | Error::InvalidArgument(_) | Error::Empty(_) => "invalid_argument",
            Error::MissingDemographics { .. } | Error::UnknownLevel { .. } | Error::Schema(_) | Error::Csv(_) => {
                "schema"
            }
            Error::SingleClass | Error::TooFewRows { .. } | Error::Separation { .. } | Error::RankDeficient { .. } => {
                "estimation"
            }
            Error::Fold { source, .. } | Error::Run { source, .. } => source.category(),
            Error::GraphTooSmall { .. } => "graph",
            Error::Gml { .. } | Error::DanglingEndpoint { .. } | Error::EdgeList { .. } => "parse",
            Error::Io { .. } => "io",
            Error::Json(_) => "serialization",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
