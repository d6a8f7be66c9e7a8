use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no ranges")]
    NoRanges,

    #[error("nothing known")]
    NothingKnown,

    #[error("no foreground")]
    NoForeground,

    #[error("degenerate axis")]
    DegenerateAxis,

    #[error("degenerate split")]
    DegenerateSplit,

    #[error("cyclic skeleton")]
    CyclicSkeleton,

    #[error("empty skeleton")]
    EmptySkeleton,

    #[error("shape too small for 3 splits")]
    TooSmallForSplits,

    #[error("wall window too small")]
    WallWindowTooSmall,

    #[error("undefined")]
    Undefined,

    #[error("zero variance")]
    ZeroVariance,

    #[error("single-class input")]
    SingleClass,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class count {count} is smaller than fold count {folds}")]
    ClassTooSmall { count: usize, folds: usize },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("all {0} input files failed")]
    AllFailed(usize),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
