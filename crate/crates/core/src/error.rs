//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),

    #[error("i/o on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Raw video file whose byte count does not divide into whole frames.
    #[error(
        "file size mismatch for {}: {actual} bytes is not a whole number of \
         {width}x{height} frames ({frame_bytes} bytes each, remainder {})",
        path.display(), actual % frame_bytes
    )]
    FileSize {
        path: PathBuf,
        width: u32,
        height: u32,
        frame_bytes: u64,
        actual: u64,
    },

    #[error("numeric: {0}")]
    Numeric(String),

    #[error("no inter slices at this rate (p_inter = 0)")]
    NoInterSlices,

    /// Wraps a component failure with the pipeline stage it occurred in.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
