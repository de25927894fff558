use std::path::PathBuf;

use thiserror::Error;

use crate::registry::Script;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("language set is empty")]
    EmptyLanguageSet,
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("word list for `{language}` has {available} unique words, need at least {required}")]
    WordListTooSmall {
        language: String,
        available: usize,
        required: usize,
    },
    #[error("script {0:?} is not covered by the configured fonts")]
    UnsupportedScript(Script),
    #[error("no glyph for U+{:04X} ({codepoint:?}) in `{label}`", *codepoint as u32)]
    GlyphMissing { label: String, codepoint: char },
    #[error("font error: {0}")]
    Font(String),

    #[error("corpus for `{0}` has no usable lines")]
    CorpusEmpty(String),
    #[error("could not place a text box after {attempts} attempts")]
    LayoutOverflow { attempts: usize },
    #[error("no corpus for language `{0}`")]
    MissingCorpus(String),
    #[error("no backgrounds available")]
    MissingBackgrounds,

    #[error("candidate {0} has no references")]
    EmptyReferences(usize),
    #[error("language identifier does not support `{0}`")]
    UnsupportedLidLanguage(String),
    #[error("invalid evaluation input: {0}")]
    InvalidInput(String),

    #[error("invalid translation request: {0}")]
    InvalidRequest(String),
    #[error("unsupported language pair {src} -> {tgt}")]
    UnsupportedLanguagePair { src: String, tgt: String },
    #[error("translation service unavailable after {attempts} attempts: {last_error}")]
    ServiceUnavailable { attempts: u32, last_error: String },
    #[error("language `{0}` has no machine-translation code")]
    MissingMtCode(String),
    #[error("plan requests {requested} samples but dataset has {available}")]
    PlanExceedsDataset { requested: u64, available: u64 },

    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ServiceUnavailable { .. } => 3,
            Error::Io { .. } | Error::Image(_) => 4,
            _ => 2,
        }
    }
}
