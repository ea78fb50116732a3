//! Spatial-statistics and motion-complexity estimators.

use crate::error::{Error, Result};
use crate::spatial::RHO_CEIL;
use crate::video::RawVideo;

const VARIANCE_FLOOR: f64 = 1e-12;

/// Per-video spatial statistics with per-frame mean removal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialStats {
    pub sigma_v2: f64,
    pub rho_vx: f64,
    pub rho_vy: f64,
    /// Set when the variance vanished or a correlation estimate fell outside
    /// [0, 1) and had to be clamped.
    pub degenerate: bool,
}

impl SpatialStats {
    pub fn rho_mean(&self) -> f64 {
        0.5 * (self.rho_vx + self.rho_vy)
    }
}

/// Frame variance and lag-1 correlation coefficients, averaged over frames.
///
/// Each frame is treated as a zero-mean field after subtracting its own mean.
/// Correlations are normalized lag-1 autocovariances, clamped to [0, 1).
pub fn estimate_spatial_stats(video: &RawVideo) -> SpatialStats {
    let w = video.width() as usize;
    let h = video.height() as usize;
    let n = video.frame_count();

    let mut var_sum = 0.0;
    let mut rho_x_sum = 0.0;
    let mut rho_y_sum = 0.0;
    let mut rho_frames = 0usize;
    let mut degenerate = false;

    let mut dev = vec![0.0f64; w * h];
    for t in 0..n {
        let frame = video.frame(t);
        let mean = frame.iter().map(|&v| v as f64).sum::<f64>() / (w * h) as f64;
        for (d, &v) in dev.iter_mut().zip(frame) {
            *d = v as f64 - mean;
        }
        let var = dev.iter().map(|d| d * d).sum::<f64>() / (w * h) as f64;
        var_sum += var;
        if var < VARIANCE_FLOOR {
            degenerate = true;
            continue;
        }

        let mut cov_x = 0.0;
        for y in 0..h {
            let row = y * w;
            for x in 0..w - 1 {
                cov_x += dev[row + x] * dev[row + x + 1];
            }
        }
        cov_x /= (h * (w - 1)) as f64;

        let mut cov_y = 0.0;
        for y in 0..h - 1 {
            let row = y * w;
            for x in 0..w {
                cov_y += dev[row + x] * dev[row + w + x];
            }
        }
        cov_y /= ((h - 1) * w) as f64;

        rho_x_sum += cov_x / var;
        rho_y_sum += cov_y / var;
        rho_frames += 1;
    }

    let sigma_v2 = var_sum / n as f64;
    let (mut rho_vx, mut rho_vy) = if rho_frames > 0 {
        (rho_x_sum / rho_frames as f64, rho_y_sum / rho_frames as f64)
    } else {
        (0.0, 0.0)
    };
    for rho in [&mut rho_vx, &mut rho_vy] {
        if *rho < 0.0 {
            *rho = 0.0;
            degenerate = true;
        } else if *rho > RHO_CEIL {
            *rho = RHO_CEIL;
            degenerate = true;
        }
    }
    SpatialStats {
        sigma_v2,
        rho_vx,
        rho_vy,
        degenerate,
    }
}

/// Inputs of the motion-complexity estimator that are not measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QvarParams {
    /// Motion-estimation error variance per axis, in squared pels.
    pub sigma_dx2: f64,
    pub sigma_dy2: f64,
    /// Temporal memory factor L.
    pub temporal_memory: f64,
}

impl Default for QvarParams {
    fn default() -> Self {
        // 1/48: variance of a uniform error on a half-pel interval.
        QvarParams {
            sigma_dx2: 1.0 / 48.0,
            sigma_dy2: 1.0 / 48.0,
            temporal_memory: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QvarEstimate {
    pub value: f64,
    /// Set when the raw estimate was negative and clamped to zero.
    pub clamped: bool,
}

/// Solves the measured MC-prediction error for the motion-complexity
/// parameter:
///
/// qvar = (sigma_hat_12 - 2 (sdx + sdy) sigma_v2 (1 - rho_v))
///        / (2 [(sdx + sdy) L + 1] / f_rate)
pub fn estimate_qvar(
    sigma_hat_12: f64,
    spatial: &SpatialStats,
    frame_rate: f64,
    params: &QvarParams,
) -> Result<QvarEstimate> {
    if frame_rate <= 0.0 || !frame_rate.is_finite() {
        return Err(Error::validation("frame rate must be positive"));
    }
    let sd_sum = params.sigma_dx2 + params.sigma_dy2;
    let denom = 2.0 * (sd_sum * params.temporal_memory + 1.0) / frame_rate;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::validation(format!(
            "qvar denominator must be positive, got {denom}"
        )));
    }
    let rho_v = spatial.rho_mean();
    let numer = sigma_hat_12 - 2.0 * sd_sum * spatial.sigma_v2 * (1.0 - rho_v);
    let raw = numer / denom;
    if raw < 0.0 {
        Ok(QvarEstimate {
            value: 0.0,
            clamped: true,
        })
    } else {
        Ok(QvarEstimate {
            value: raw,
            clamped: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn video_from_frames(frames: &[Vec<u8>], w: u32, h: u32) -> RawVideo {
        let mut data = Vec::new();
        for f in frames {
            data.extend_from_slice(f);
        }
        RawVideo::new(w, h, 50.0, data).unwrap()
    }

    #[test]
    fn constant_video_is_degenerate() {
        let frame = vec![128u8; 64 * 64];
        let video = video_from_frames(&[frame.clone(), frame], 64, 64);
        let stats = estimate_spatial_stats(&video);
        assert_eq!(stats.sigma_v2, 0.0);
        assert_eq!(stats.rho_vx, 0.0);
        assert!(stats.degenerate);
    }

    #[test]
    fn checkerboard_rho_clamps_to_zero() {
        // alternating +-1 around the mean: lag-1 autocovariance is exactly -1
        let w = 32usize;
        let frame: Vec<u8> = (0..w * w)
            .map(|i| {
                let (x, y) = (i % w, i / w);
                if (x + y) % 2 == 0 {
                    101
                } else {
                    99
                }
            })
            .collect();
        let video = video_from_frames(&[frame.clone(), frame], w as u32, w as u32);
        let stats = estimate_spatial_stats(&video);
        assert!((stats.sigma_v2 - 1.0).abs() < 1e-9);
        assert_eq!(stats.rho_vx, 0.0);
        assert_eq!(stats.rho_vy, 0.0);
        assert!(stats.degenerate);
    }

    #[test]
    fn qvar_zero_when_numerator_vanishes() {
        let spatial = SpatialStats {
            sigma_v2: 2300.0,
            rho_vx: 0.95,
            rho_vy: 0.95,
            degenerate: false,
        };
        let params = QvarParams::default();
        let sd_sum = params.sigma_dx2 + params.sigma_dy2;
        let sigma12 = 2.0 * sd_sum * 2300.0 * (1.0 - 0.95);
        let est = estimate_qvar(sigma12, &spatial, 50.0, &params).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(!est.clamped);
    }

    #[test]
    fn qvar_matches_independent_transcription() {
        // sigma12 = 60, sv2 = 2300, rho = 0.95, L = 100, F = 50, sd = 1/48 each
        let spatial = SpatialStats {
            sigma_v2: 2300.0,
            rho_vx: 0.95,
            rho_vy: 0.95,
            degenerate: false,
        };
        let est = estimate_qvar(60.0, &spatial, 50.0, &QvarParams::default()).unwrap();
        assert!(
            (est.value - 243.9516129032258).abs() < 1e-9,
            "got {}",
            est.value
        );
    }

    #[test]
    fn qvar_negative_clamps_with_flag() {
        let spatial = SpatialStats {
            sigma_v2: 2300.0,
            rho_vx: 0.5,
            rho_vy: 0.5,
            degenerate: false,
        };
        let est = estimate_qvar(0.0, &spatial, 50.0, &QvarParams::default()).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.clamped);
    }

    #[test]
    fn qvar_monotone_in_inputs() {
        let spatial = SpatialStats {
            sigma_v2: 2300.0,
            rho_vx: 0.95,
            rho_vy: 0.95,
            degenerate: false,
        };
        let params = QvarParams::default();
        let base = estimate_qvar(60.0, &spatial, 50.0, &params).unwrap().value;
        let more_residual = estimate_qvar(80.0, &spatial, 50.0, &params).unwrap().value;
        let faster = estimate_qvar(60.0, &spatial, 60.0, &params).unwrap().value;
        assert!(more_residual > base);
        assert!(faster > base);
    }
}
