//! Second-order statistics of the motion-compensated prediction residual.
//!
//! The residual of inter coding is modeled as a separable first-order Markov
//! field. Its variance composes four effects: motion-estimation inaccuracy
//! acting on the spatial gradient, unexplained motion energy accumulated over
//! the inter-frame interval, and the temporally-local noise of the coded and
//! reference frames (spatial-scaling and compression noise).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::VideoStats;

/// How the compression part of the reference-frame noise is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CompressionNoiseMode {
    /// Rate-distortion of a memoryless Gaussian source: sigma_v2 * 2^(-2r).
    Gaussian,
    /// Empirical power-law curve beta * r^(-alpha).
    Empirical { alpha: f64, beta: f64 },
}

/// Compression-noise variance at `r` bits per pixel.
pub fn compression_noise(mode: &CompressionNoiseMode, r: f64, sigma_v2: f64) -> Result<f64> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::validation(format!(
            "bits per pixel must be nonnegative, got {r}"
        )));
    }
    match *mode {
        CompressionNoiseMode::Gaussian => Ok(sigma_v2 * (-2.0 * r).exp2()),
        CompressionNoiseMode::Empirical { alpha, beta } => {
            if r == 0.0 {
                return Err(Error::validation(
                    "empirical compression-noise curve has a pole at r = 0",
                ));
            }
            Ok(beta * r.powf(-alpha))
        }
    }
}

/// Model constants of the residual statistics.
///
/// The ME error variances are measured on the continuous unit square; the
/// pixel pitches eps convert them to the squared-pel scale the underlying
/// discrete model was fitted in, so sigma_dx2 / eps_x^2 is the ME error in
/// squared pels of the original raster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualParams {
    pub sigma_dx2: f64,
    pub sigma_dy2: f64,
    /// Pixel pitch of the original raster on the unit square: 1/W0, 1/H0.
    pub eps_x: f64,
    pub eps_y: f64,
    /// Temporal memory factor L.
    pub temporal_memory: f64,
    /// Skip-mode energy penalty, >= 1.
    pub gamma_skip: f64,
}

impl ResidualParams {
    /// Parameters for ME error given in squared pels of the original raster
    /// (1/48 per axis corresponds to half-pel accuracy).
    pub fn from_pel_units(
        sigma_dx2_pel: f64,
        sigma_dy2_pel: f64,
        width: u32,
        height: u32,
        temporal_memory: f64,
        gamma_skip: f64,
    ) -> Self {
        let eps_x = 1.0 / width as f64;
        let eps_y = 1.0 / height as f64;
        ResidualParams {
            sigma_dx2: sigma_dx2_pel * eps_x * eps_x,
            sigma_dy2: sigma_dy2_pel * eps_y * eps_y,
            eps_x,
            eps_y,
            temporal_memory,
            gamma_skip,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_dx2", self.sigma_dx2),
            ("sigma_dy2", self.sigma_dy2),
            ("temporal_memory", self.temporal_memory),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(Error::validation(format!("{name} must be nonnegative")));
            }
        }
        if self.eps_x.is_nan() || self.eps_y.is_nan() || self.eps_x <= 0.0 || self.eps_y <= 0.0 {
            return Err(Error::validation("pixel pitches must be positive"));
        }
        if self.gamma_skip.is_nan() || self.gamma_skip < 1.0 {
            return Err(Error::validation(format!(
                "gamma_skip must be >= 1, got {}",
                self.gamma_skip
            )));
        }
        Ok(())
    }

    /// ME error variances in squared pels of the original raster.
    fn pel_units(&self) -> (f64, f64) {
        (
            self.sigma_dx2 / (self.eps_x * self.eps_x),
            self.sigma_dy2 / (self.eps_y * self.eps_y),
        )
    }
}

/// Temporally-local noise energies of the coded and reference frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseState {
    /// Coded frame: spatial-scaling noise only.
    pub sigma_w_current2: f64,
    /// Reference frame: spatial-scaling plus compression noise.
    pub sigma_w_ref2: f64,
}

impl NoiseState {
    pub fn new(spatial_scaling2: f64, compression2: f64) -> Self {
        NoiseState {
            sigma_w_current2: spatial_scaling2,
            sigma_w_ref2: spatial_scaling2 + compression2,
        }
    }
}

/// Residual variance:
///
/// sigma_fr2 = 2 (sdx/eps_x^2 + sdy/eps_y^2)
///             * [sigma_v2 (1 - rho_v) + (L/F) qvar + w_ref]
///             + 2 qvar d_t + w_current + w_ref
///
/// with d_t = 1 / f_rate_scaled, the interval between coded frames.
pub fn residual_variance(
    stats: &VideoStats,
    params: &ResidualParams,
    noise: &NoiseState,
    f_rate_scaled: f64,
) -> Result<f64> {
    params.validate()?;
    if f_rate_scaled <= 0.0 || !f_rate_scaled.is_finite() {
        return Err(Error::validation("scaled frame rate must be positive"));
    }
    let (sdx_pel, sdy_pel) = params.pel_units();
    let gradient_energy = stats.sigma_v2 * (1.0 - stats.rho_mean())
        + params.temporal_memory / f_rate_scaled * stats.qvar
        + noise.sigma_w_ref2;
    let d_t = 1.0 / f_rate_scaled;
    Ok(2.0 * (sdx_pel + sdy_pel) * gradient_energy
        + 2.0 * stats.qvar * d_t
        + noise.sigma_w_current2
        + noise.sigma_w_ref2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEstimate {
    pub value: f64,
    /// Set when the raw value fell outside [0, 1) and was clamped, or the
    /// residual variance vanished.
    pub clamped: bool,
}

/// Residual lag-1 correlation coefficient along one axis.
///
/// The identity ties rho * sigma_fr2 to the pel-scale ME error variances:
///
/// rho_x sigma_fr2 = 2 (sdx + sdy) sigma_v2 rho_v
///                   - sdx [sigma_v2 (1 + rho_v^2) + (L/F) qvar + w_ref]
///                   - 2 sdy sigma_v2 rho_v^2
///
/// (swap x and y for the vertical axis), clamped to [0, 1).
pub fn residual_rho(
    stats: &VideoStats,
    params: &ResidualParams,
    noise: &NoiseState,
    f_rate_scaled: f64,
    axis: Axis,
) -> Result<RhoEstimate> {
    let variance = residual_variance(stats, params, noise, f_rate_scaled)?;
    if variance.is_nan() || variance <= 0.0 {
        return Ok(RhoEstimate {
            value: 0.0,
            clamped: true,
        });
    }
    let (sdx_pel, sdy_pel) = params.pel_units();
    // "along" is the requested axis, "across" the other one
    let (sd_along, sd_across) = match axis {
        Axis::X => (sdx_pel, sdy_pel),
        Axis::Y => (sdy_pel, sdx_pel),
    };
    let rho_v = stats.rho_mean();
    let numer = 2.0 * (sd_along + sd_across) * stats.sigma_v2 * rho_v
        - sd_along
            * (stats.sigma_v2 * (1.0 + rho_v * rho_v)
                + params.temporal_memory / f_rate_scaled * stats.qvar
                + noise.sigma_w_ref2)
        - 2.0 * sd_across * stats.sigma_v2 * rho_v * rho_v;
    let raw = numer / variance;
    let clamped_value = raw.clamp(0.0, crate::spatial::RHO_CEIL);
    Ok(RhoEstimate {
        value: clamped_value,
        clamped: clamped_value != raw,
    })
}

/// Skip-mode reconstruction MSE: gamma times the inter residual energy.
pub fn skip_mse(residual_variance: f64, gamma_skip: f64) -> Result<f64> {
    if gamma_skip.is_nan() || gamma_skip < 1.0 {
        return Err(Error::validation(format!(
            "gamma_skip must be >= 1, got {gamma_skip}"
        )));
    }
    Ok(gamma_skip * residual_variance)
}
