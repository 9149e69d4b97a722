use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid combination: {0}")]
    InvalidCombination(String),

    #[error("rank {h} out of range 1..=C({n},{k})")]
    RankOutOfRange { h: String, k: u32, n: u32 },

    #[error("invalid group size k={k} for universe of n={n} items")]
    InvalidSize { k: u32, n: u32 },

    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("empty universe")]
    EmptyUniverse,

    #[error("empty bridge")]
    EmptyBridge,

    #[error("universe size {n} exceeds limit {limit}")]
    UniverseTooLarge { n: usize, limit: usize },

    #[error("duplicate key {0}")]
    DuplicateKey(String),

    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("type mismatch on `{attribute}`: {left} vs {right}")]
    TypeMismatch {
        attribute: String,
        left: String,
        right: String,
    },

    #[error("row has {got} values but schema has {expected} attributes")]
    Arity { expected: usize, got: usize },

    #[error("key violation: {0}")]
    KeyViolation(String),

    #[error("referential violation: {0}")]
    ReferentialViolation(String),

    #[error("corrupt group key {key}: {reason}")]
    CorruptGroupKey { key: String, reason: String },

    #[error("attribute name collision: {0}")]
    NameCollision(String),

    #[error("unknown item {0}")]
    UnknownItem(String),

    #[error("stale universe: data was encoded against {expected}, got {found}")]
    StaleUniverse { expected: String, found: String },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("malformed group key `{0}`")]
    GroupKeyParse(String),

    #[error("invalid group key `{0}`: h and k must be positive")]
    InvalidGroupKey(String),

    #[error("{}:{}: {kind}", path.display(), line.map_or_else(|| "-".to_string(), |l| l.to_string()))]
    Csv {
        path: PathBuf,
        line: Option<u64>,
        kind: CsvErrorKind,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// What went wrong while reading a CSV or manifest file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsvErrorKind {
    #[error("ragged row: expected {expected} fields, found {found}")]
    Ragged { expected: usize, found: usize },
    #[error("duplicate header `{0}`")]
    DuplicateHeader(String),
    #[error("missing header row")]
    MissingHeader,
    #[error("key violation: {0}")]
    KeyViolation(String),
    #[error("bad value: {0}")]
    BadValue(String),
    #[error("{0}")]
    Syntax(String),
}

impl Error {
    /// True for I/O and file-format problems, as opposed to data that parsed
    /// but failed validation.
    pub fn is_format_error(&self) -> bool {
        match self {
            Error::Io { .. } | Error::GroupKeyParse(_) => true,
            Error::Csv { kind, .. } => !matches!(kind, CsvErrorKind::KeyViolation(_)),
            _ => false,
        }
    }
}
