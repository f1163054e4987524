use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the evaluation pipeline.
///
/// Variants are grouped by the exit code the command-line tool maps them to:
/// I/O problems, data/validation problems, and statistical precondition
/// failures.
#[derive(Debug, Error)]
pub enum Error {
    // I/O
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    // data and validation
    #[error("{}:{line}: {msg}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}:{line}: unresolved {kind} `{id}`", file.display())]
    UnresolvedReference {
        file: PathBuf,
        line: usize,
        kind: &'static str,
        id: String,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{}:{line}: unknown segment `{seg_id}`", file.display())]
    UnknownSegment {
        file: PathBuf,
        line: usize,
        seg_id: String,
    },
    #[error("{}:{line}: non-finite score `{value}`", file.display())]
    NonFiniteScore {
        file: PathBuf,
        line: usize,
        value: String,
    },
    #[error("duplicate cell ({system}, {seg_id}) in {table}")]
    DuplicateCell {
        table: String,
        system: String,
        seg_id: String,
    },
    #[error("table {table} has no score for ({system}, {seg_id})")]
    IncompleteTable {
        table: String,
        system: String,
        seg_id: String,
    },
    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    // statistical preconditions
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("hypothesis corpus has zero length")]
    ZeroLengthHypothesisCorpus,
    #[error("empty input set: {0}")]
    EmptySet(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("ratio {0} outside the allowed range")]
    InvalidRatio(String),
    #[error("requested {requested} segments but only {available} available")]
    NotEnoughSegments { requested: usize, available: usize },
    #[error("zero variance: {0}")]
    ZeroVariance(String),
    #[error("missing key: {0}")]
    MissingKey(String),
    #[error("annotator {annotator} shares only {shared} items with the others")]
    InsufficientOverlap { annotator: String, shared: usize },
    #[error("no unit has two or more ratings")]
    NoPairableUnits,
    #[error("all values tied")]
    AllTied,
    #[error("need at least 2 real systems, found {0}")]
    TooFewSystems(usize),
    #[error("metric {0} is system-level only")]
    SystemOnlyTable(String),
    #[error("no variants supplied")]
    NoVariants,
    #[error("correlation {0} is degenerate")]
    DegenerateCorrelation(f64),
    #[error("sample size {0} too small")]
    SampleTooSmall(usize),
    #[error("score tables cover different cells: {0}")]
    CellMismatch(String),
    #[error("paired samples are not aligned: {0}")]
    AlignmentMismatch(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub fn parse(file: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code: 1 validation failure, 2 I/O error, 3 statistical
    /// precondition failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingFile(_) | Error::Io { .. } => 2,
            Error::Parse { .. }
            | Error::UnresolvedReference { .. }
            | Error::InvalidConfig(_)
            | Error::UnknownSegment { .. }
            | Error::NonFiniteScore { .. }
            | Error::DuplicateCell { .. }
            | Error::IncompleteTable { .. }
            | Error::UnsupportedFormat(_) => 1,
            _ => 3,
        }
    }
}
