use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("design error: {0}")]
    Design(String),

    #[error("run {run_id}: {source}")]
    Run {
        run_id: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("world is terminated at tick {tick}; cannot step")]
    Terminated { tick: u32 },

    #[error("cannot aggregate an empty set of values")]
    EmptyAggregation,

    #[error("no rows")]
    NoRows,

    #[error("report error: {0}")]
    Report(String),

    #[error("malformed results csv: {0}")]
    MalformedCsv(String),

    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
