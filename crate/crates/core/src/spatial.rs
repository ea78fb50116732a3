//! Spatial down-scaling error from the truncated frame power spectrum.
//!
//! A frame is modeled as a separable first-order Markov field on the unit
//! square. Sampling at the original raster keeps the spectrum inside a box
//! A_0; sampling at the scaled raster keeps a smaller box A_d. The power in
//! A_0 \ A_d is the additional mean-squared error a smaller frame size costs.

use std::f64::consts::PI;

use crate::video::VideoStats;

/// Lower clamp applied to correlation coefficients before taking logs, so
/// the spectral decay stays finite.
pub const RHO_FLOOR: f64 = 1e-12;

/// Upper clamp: a perfectly correlated frame would have zero decay.
pub const RHO_CEIL: f64 = 1.0 - 1e-9;

/// Spectral decay from a lag-1 correlation: alpha = -dim * ln(rho).
pub fn alpha_from_rho(rho: f64, dim: f64) -> f64 {
    -dim * rho.clamp(RHO_FLOOR, RHO_CEIL).ln()
}

/// Frame power-spectral-density parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePsdParams {
    pub sigma_v2: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub w0: f64,
    pub h0: f64,
}

impl FramePsdParams {
    pub fn from_stats(stats: &VideoStats) -> Self {
        let w0 = stats.width as f64;
        let h0 = stats.height as f64;
        FramePsdParams {
            sigma_v2: stats.sigma_v2,
            alpha_x: alpha_from_rho(stats.rho_vx, w0),
            alpha_y: alpha_from_rho(stats.rho_vy, h0),
            w0,
            h0,
        }
    }
}

/// Separable Lorentzian PSD: 4 sigma_v2 ax ay / ((ax^2+wx^2)(ay^2+wy^2)).
pub fn psd(params: &FramePsdParams, omega_x: f64, omega_y: f64) -> f64 {
    let ax = params.alpha_x;
    let ay = params.alpha_y;
    4.0 * params.sigma_v2 * ax * ay
        / ((ax * ax + omega_x * omega_x) * (ay * ay + omega_y * omega_y))
}

/// Box integral of the unit-variance separable Lorentzian over
/// `[x1,x2] x [y1,y2]` (one quadrant):
///
/// I = 4 [atan(x2/ax) - atan(x1/ax)] [atan(y2/ay) - atan(y1/ay)]
///
/// The difference-of-arctangents form is used directly; it is branch-safe for
/// any nonnegative frequencies.
pub fn integral_i(
    omega_x1: f64,
    omega_x2: f64,
    omega_y1: f64,
    omega_y2: f64,
    alpha_x: f64,
    alpha_y: f64,
) -> f64 {
    debug_assert!(omega_x1 <= omega_x2 && omega_y1 <= omega_y2);
    debug_assert!(alpha_x > 0.0 && alpha_y > 0.0);
    4.0 * ((omega_x2 / alpha_x).atan() - (omega_x1 / alpha_x).atan())
        * ((omega_y2 / alpha_y).atan() - (omega_y1 / alpha_y).atan())
}

/// Mean-squared error of spatial down-scaling by (d_m, d_n).
///
/// The lost band A_0 \ A_d decomposes into a corner box and two strips; each
/// is one `integral_i` term. Factors below 1 lose nothing and are treated
/// as 1.
pub fn spatial_scaling_mse(params: &FramePsdParams, d_m: f64, d_n: f64) -> f64 {
    let d_m = d_m.max(1.0);
    let d_n = d_n.max(1.0);
    let w0x = PI * params.w0;
    let w0y = PI * params.h0;
    let wdx = w0x / d_m;
    let wdy = w0y / d_n;
    let (ax, ay) = (params.alpha_x, params.alpha_y);
    params.sigma_v2 / (PI * PI)
        * (integral_i(wdx, w0x, wdy, w0y, ax, ay)
            + integral_i(wdx, w0x, 0.0, wdy, ax, ay)
            + integral_i(0.0, wdx, wdy, w0y, ax, ay))
}
