//! Raw grayscale video and the second-order statistics the model consumes.

mod io;
mod motion;
mod stats;

pub use io::{load_raw_video, write_raw_video};
pub use motion::{block_match_pair, estimate_prediction_error, BlockMatch, MotionSearchParams};
pub use stats::{estimate_qvar, estimate_spatial_stats, QvarEstimate, QvarParams, SpatialStats};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar 8-bit luma video: concatenated row-major frames.
#[derive(Debug, Clone, PartialEq)]
pub struct RawVideo {
    width: u32,
    height: u32,
    frame_rate: f64,
    data: Vec<u8>,
}

impl RawVideo {
    /// Wraps concatenated frames. Needs positive dimensions, a positive frame
    /// rate and at least two full frames.
    pub fn new(width: u32, height: u32, frame_rate: f64, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        if frame_rate <= 0.0 || !frame_rate.is_finite() {
            return Err(Error::validation(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        let frame_bytes = width as usize * height as usize;
        if !data.len().is_multiple_of(frame_bytes) {
            return Err(Error::validation(format!(
                "{} bytes is not a whole number of {width}x{height} frames",
                data.len()
            )));
        }
        let frames = data.len() / frame_bytes;
        if frames < 2 {
            return Err(Error::validation(format!(
                "need at least 2 frames, got {frames}"
            )));
        }
        Ok(RawVideo {
            width,
            height,
            frame_rate,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn frame_count(&self) -> usize {
        self.data.len() / (self.width as usize * self.height as usize)
    }

    pub fn frame(&self, index: usize) -> &[u8] {
        let frame_bytes = self.width as usize * self.height as usize;
        &self.data[index * frame_bytes..(index + 1) * frame_bytes]
    }

    pub fn bytes(&self) -> &[u8] {
        &self.data
    }
}

/// Measured second-order statistics of a source video.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoStats {
    /// Luma variance after per-frame mean removal.
    pub sigma_v2: f64,
    /// Horizontal lag-1 correlation coefficient, in [0, 1).
    pub rho_vx: f64,
    /// Vertical lag-1 correlation coefficient, in [0, 1).
    pub rho_vy: f64,
    /// Motion-complexity parameter: frame-to-frame change energy per unit
    /// time beyond what translational motion estimation explains.
    pub qvar: f64,
    pub width: u32,
    pub height: u32,
    pub frame_rate: f64,
}

impl VideoStats {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_v2.is_nan() || self.sigma_v2 < 0.0 {
            return Err(Error::validation(format!(
                "sigma_v2 must be nonnegative, got {}",
                self.sigma_v2
            )));
        }
        if self.qvar.is_nan() || self.qvar < 0.0 {
            return Err(Error::validation(format!(
                "qvar must be nonnegative, got {}",
                self.qvar
            )));
        }
        for (name, rho) in [("rho_vx", self.rho_vx), ("rho_vy", self.rho_vy)] {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::validation(format!(
                    "{name} must lie in [0, 1), got {rho}"
                )));
            }
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::validation("frame dimensions must be positive"));
        }
        if self.frame_rate <= 0.0 || !self.frame_rate.is_finite() {
            return Err(Error::validation("frame rate must be positive"));
        }
        Ok(())
    }

    /// Scalar pixel correlation: arithmetic mean of the two axis coefficients.
    pub fn rho_mean(&self) -> f64 {
        0.5 * (self.rho_vx + self.rho_vy)
    }
}
