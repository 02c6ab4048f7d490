use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("header does not match schema: {0}")]
    HeaderMismatch(String),

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("column `{column}` has the wrong kind: expected {expected}")]
    WrongKind { column: String, expected: &'static str },

    #[error("column `{0}` has no non-missing values")]
    AllMissing(String),

    #[error("column `{0}` still has missing cells")]
    MissingCells(String),

    #[error("filter on `{0}` removed every row")]
    EmptyResult(String),

    #[error("bucket edges must be strictly ascending")]
    UnsortedEdges,

    #[error("cannot drop {k} of {columns} columns")]
    TooManyDropped { k: usize, columns: usize },

    #[error("unseen category `{value}` in column `{column}`")]
    UnseenCategory { column: String, value: String },

    #[error("column `{0}` has role=drop; remove dropped columns before encoding")]
    DropColumnPresent(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class `{class}` of `{column}` has fewer than 2 rows")]
    TinyClass { column: String, class: String },

    #[error("labels contain a single class")]
    SingleClass,

    #[error("input contains a non-finite value")]
    NonFinite,

    #[error("loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("singular system (try ridge_lambda > 0)")]
    Singular,

    #[error("protected column `{0}` is constant; nothing to debias")]
    ConstantProtected(String),

    #[error("training diverged at epoch {epoch}")]
    DebiasDiverged {
        epoch: usize,
        trace: crate::debias::TrainingTrace,
    },

    #[error("schema of the input table does not match the fitted model: {0}")]
    SchemaMismatch(String),

    #[error("empty cell: group `{group}`, stratum `{stratum}`")]
    EmptyCell { group: String, stratum: String },

    #[error("fewer than two groups")]
    TooFewGroups,

    #[error("empty input")]
    EmptyInput,

    #[error("study configuration error: {0}")]
    Config(String),

    #[error("dataset unavailable: {0}")]
    DataUnavailable(String),

    #[error("checksum mismatch for {path}: expected {expected}, found {found}")]
    Checksum {
        path: PathBuf,
        expected: String,
        found: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics (divergence, singular systems) as
    /// opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Diverged { .. } | Error::Singular | Error::DebiasDiverged { .. }
        )
    }
}
