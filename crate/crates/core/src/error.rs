use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Nyquist violation: temporal frequency {tf_hz} Hz needs a sample rate of at least {required} Hz, got {sample_rate} Hz")]
    Nyquist {
        tf_hz: f64,
        sample_rate: f64,
        required: f64,
    },

    #[error("luminance range violation: mean {mean} with contrast {contrast} spans [{lo}, {hi}], outside [0, 1]")]
    LuminanceRange {
        mean: f64,
        contrast: f64,
        lo: f64,
        hi: f64,
    },

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("degenerate fit design: {0}")]
    DegenerateFit(String),

    #[error("robot position ({x:.4}, {y:.4}) lies outside the arena")]
    OutsideArena { x: f64, y: f64 },

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
