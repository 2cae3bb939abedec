use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class, used by the command line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or missing input files and values.
    Input,
    /// The input was well formed but the computation could not proceed.
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("need at least 2 distinct points, got {0}")]
    InsufficientPoints(usize),

    #[error("parse error in {source_name}: {msg}")]
    Parse { source_name: String, msg: String },

    #[error("no building features in input")]
    EmptyInput,

    #[error("no blocks survived polygonization and filtering")]
    NoBlocksFound,

    #[error("block {block_id}: building footprints cover {footprint_area:.3} m2, more than the block area {block_area:.3} m2")]
    DegenerateBlock {
        block_id: String,
        footprint_area: f64,
        block_area: f64,
    },

    #[error("indicator {0} is constant over the corpus")]
    ConstantIndicator(String),

    #[error("indicators with zero variance: {}", .0.join(", "))]
    ZeroVariance(Vec<String>),

    #[error("need at least {needed} blocks, got {found}")]
    TooFewBlocks { needed: usize, found: usize },

    #[error("unknown metric set {0:?}")]
    UnknownSet(String),

    #[error("unknown indicator {0:?}")]
    UnknownIndicator(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature matrix is empty")]
    EmptyFeatures,

    #[error("unknown block {0:?}")]
    UnknownBlock(String),

    #[error("missing indicator {0} in query values")]
    MissingIndicator(String),

    #[error("indicator {indicator} value {value} outside corpus range [{min}, {max}]")]
    OutOfRange {
        indicator: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(source_name: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. }
            | Error::EmptyInput
            | Error::UnknownSet(_)
            | Error::UnknownIndicator(_)
            | Error::UnknownBlock(_)
            | Error::MissingIndicator(_)
            | Error::OutOfRange { .. }
            | Error::InvalidConfig(_)
            | Error::Io { .. }
            | Error::Json(_) => ErrorClass::Input,
            _ => ErrorClass::Computation,
        }
    }

    /// Short machine-readable code for structured diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateGeometry(_) => "degenerate_geometry",
            Error::InvalidGeometry(_) => "invalid_geometry",
            Error::InsufficientPoints(_) => "insufficient_points",
            Error::Parse { .. } => "parse_error",
            Error::EmptyInput => "empty_input",
            Error::NoBlocksFound => "no_blocks_found",
            Error::DegenerateBlock { .. } => "degenerate_block",
            Error::ConstantIndicator(_) => "constant_indicator",
            Error::ZeroVariance(_) => "zero_variance",
            Error::TooFewBlocks { .. } => "too_few_blocks",
            Error::UnknownSet(_) => "unknown_set",
            Error::UnknownIndicator(_) => "unknown_indicator",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptyFeatures => "empty_features",
            Error::UnknownBlock(_) => "unknown_block",
            Error::MissingIndicator(_) => "missing_indicator",
            Error::OutOfRange { .. } => "out_of_range",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Io { .. } => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}
