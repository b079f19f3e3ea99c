use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("range error: {0}")]
    Range(String),

    #[error("cannot fit idf on an empty corpus")]
    EmptyCorpus,

    #[error("degenerate input: {0}")]
    DegenerateInput(Degenerate),

    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperParams(String),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("report error: {0}")]
    Report(String),
}

/// Why a training set cannot produce a classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degenerate {
    NoRecords,
    SingleClass,
    EmptyVocabulary,
}

impl fmt::Display for Degenerate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degenerate::NoRecords => f.write_str("no training records"),
            Degenerate::SingleClass => f.write_str("training labels contain a single class"),
            Degenerate::EmptyVocabulary => {
                f.write_str("empty vocabulary (every token is a stop word or too short)")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedJson,
    MissingField,
    BadStars,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind:?}: {detail}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model format version {found} (this build reads version {supported})")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("corrupt model section: {0}")]
    CorruptSection(String),
}
