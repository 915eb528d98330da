use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value at flat index {index}")]
    NonFiniteValue { index: usize },

    #[error("pixel value {value} at flat index {index} is outside [0, 1]")]
    OutOfRangePixel { index: usize, value: f64 },

    #[error("mask value {value} at flat index {index} is not binary")]
    NonBinaryMask { index: usize, value: u8 },

    #[error("negative amplitude {value} at flat index {index}")]
    NegativeAmplitude { index: usize, value: f64 },

    #[error("imaginary residual {residual:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidualExceeded { residual: f64, tolerance: f64 },

    #[error("channel count mismatch: expected {expected}, got {got}")]
    ChannelCountMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty mask: {0}")]
    EmptyMask(String),

    #[error("empty point set")]
    EmptySet,

    #[error("leave-one-domain-out needs at least 2 domains, got {0}")]
    InsufficientDomains(usize),

    #[error("unknown domain id {0}")]
    UnknownDomain(usize),

    #[error("missing directory: {}", .0.display())]
    MissingDirectory(PathBuf),

    #[error("cannot decode image {}: {reason}", path.display())]
    UndecodableImage { path: PathBuf, reason: String },

    #[error("mask {} is {mask_w}x{mask_h} but image is {image_w}x{image_h}", path.display())]
    MaskSizeMismatch {
        path: PathBuf,
        mask_w: u32,
        mask_h: u32,
        image_w: u32,
        image_h: u32,
    },

    #[error("missing counterpart file: {}", .0.display())]
    MissingCounterpartFile(PathBuf),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("cannot encode image {}: {reason}", path.display())]
    Encode { path: PathBuf, reason: String },

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches the offending file to a validation error.
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (Error::File { .. }
            | Error::Io { .. }
            | Error::UndecodableImage { .. }
            | Error::Encode { .. }) => e,
            other => Error::File {
                path: path.into(),
                source: Box::new(other),
            },
        }
    }

    /// True for filesystem and encoding failures, false for validation failures.
    pub fn is_io(&self) -> bool {
        if let Error::File { source, .. } = self {
            return source.is_io();
        }
        matches!(
            self,
            Error::Io { .. }
                | Error::Csv { .. }
                | Error::Encode { .. }
                | Error::MissingDirectory(_)
                | Error::MissingCounterpartFile(_)
        )
    }

    /// Process exit code used by the command-line tool: 1 for validation, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        if self.is_io() {
            2
        } else {
            1
        }
    }
}
