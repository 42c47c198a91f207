use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("insufficient disk space while writing {}", path.display())]
    InsufficientDiskSpace { path: PathBuf },

    #[error("{format} import is not implemented")]
    NotImplemented { format: String },

    #[error("{mode} sampling selected nothing: {detail}")]
    EmptySample { mode: String, detail: String },

    #[error("offset {offset} must be smaller than the sampling step {step}")]
    OffsetTooLarge { offset: u64, step: u64 },

    #[error("invalid sampler: {0}")]
    InvalidSampler(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("dataset has no cited references with a publication year")]
    EmptyDataset,

    #[error("spectrograms share no reference publication years")]
    EmptyWindow,

    #[error("unsupported CRE version {found}")]
    VersionMismatch { found: String },

    #[error("CRE checksum mismatch (expected {expected}, found {found})")]
    ChecksumMismatch { expected: String, found: String },

    #[error("malformed CRE file at line {line}: {message}")]
    CreFormat { line: usize, message: String },

    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{line}:{column}: unknown function `{name}`")]
    UnknownFunction {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("{line}:{column}: {message}")]
    BadArgument {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("no dataset loaded; `{0}` needs a prior importFile")]
    NoDataset(String),

    #[error("{line}:{column}: in `{call}`: {source}")]
    Script {
        line: usize,
        column: usize,
        call: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps an I/O error, promoting "disk full" to its own variant.
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::StorageFull || source.raw_os_error() == Some(28) {
            Error::InsufficientDiskSpace { path }
        } else {
            Error::Io { path, source }
        }
    }
}
