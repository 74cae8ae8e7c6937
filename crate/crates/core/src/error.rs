use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: no records")]
    NoRecords(PathBuf),

    #[error("invalid language tag {0:?}: expected 2-3 lowercase ASCII letters")]
    InvalidLanguageTag(String),

    #[error("source and target language are both {0}")]
    SameLanguage(String),

    #[error("missing language tags for {0}: pass them explicitly or provide a .meta.json sidecar")]
    MissingLanguageTags(PathBuf),

    #[error("record {index} contains a tab; use the jsonl format for this corpus")]
    TabInTsv { index: usize },

    #[error("record {index} contains a line break; cannot be written as tsv")]
    NewlineInTsv { index: usize },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("record {index} has an empty {side} side")]
    EmptySide { index: usize, side: &'static str },

    #[error("{0} side of the corpus has no tokens")]
    EmptyVocabulary(&'static str),

    #[error("cannot sample a replacement for {0:?}: vocabulary has no other token")]
    VocabularyTooSmall(String),

    #[error("rate {0} is outside [0, 1]")]
    InvalidRate(f64),

    #[error("{0}")]
    InvalidSpec(String),

    #[error("translation of record {index} failed: {message}")]
    Translation { index: usize, message: String },

    #[error("hypotheses ({hyps}) and references ({refs}) differ in length")]
    LengthMismatch { hyps: usize, refs: usize },

    #[error("run {run}: produced {actual} records, count law expects {expected}")]
    CountLaw {
        run: String,
        actual: usize,
        expected: usize,
    },

    #[error("table fixture: {0}")]
    Fixture(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
