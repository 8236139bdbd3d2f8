//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("empty input: {path} contains no data rows")]
    EmptyInput { path: String },

    #[error("no events fall within the snapshot range {start}..={end}")]
    NoEventsInRange { start: i32, end: i32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("snapshot at t={t} contains no nodes")]
    EmptySnapshot { t: i32 },

    #[error("node `{label}` is not present in the snapshot at t={t}")]
    NodeNotPresent { label: String, t: i32 },

    #[error("score tables cover different node sets and cannot be paired")]
    NodeSetMismatch,

    #[error("correlation is undefined: scores have zero variance")]
    ZeroVariance,

    #[error("score for node `{label}` is NaN; sanitize scores before ranking")]
    NanScore { label: String },

    #[error("beta parameters must be positive and finite, got alpha={alpha}, beta={beta}")]
    InvalidBeta { alpha: f64, beta: f64 },

    #[error("rank count {g} outside the valid range 1..={n}")]
    RankOutOfRange { g: u64, n: u64 },

    #[error("divergence evaluation overflowed for alpha={alpha}, beta={beta}")]
    DivergenceOverflow { alpha: f64, beta: f64 },

    #[error("snapshot series too short: got {got}, need at least {need}")]
    TooFewSnapshots { got: usize, need: usize },

    #[error("unknown hypothesis `{name}`; valid names: past_rank, regular_growth, uniform")]
    UnknownHypothesis { name: String },

    #[error("unknown measure `{name}`; valid names: pagerank, disruption")]
    UnknownMeasure { name: String },

    #[error("t={t} is not a snapshot; available: {}", format_years(available))]
    UnknownSnapshot { t: i32, available: Vec<i32> },

    #[error("snapshot cache {path} is unusable: {reason}")]
    CacheInvalid { path: String, reason: String },

    #[error("missing analysis artifact {path}; run `analyze` first")]
    MissingArtifact { path: PathBuf },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by how the tool was invoked rather than by the
    /// data it was pointed at. The CLI maps these to exit code 1, everything
    /// else to exit code 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::UnknownHypothesis { .. }
                | Error::UnknownMeasure { .. }
                | Error::UnknownSnapshot { .. }
        )
    }
}

fn format_years(years: &[i32]) -> String {
    let strs: Vec<String> = years.iter().map(|y| y.to_string()).collect();
    strs.join(", ")
}
