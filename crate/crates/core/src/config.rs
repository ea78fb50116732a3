//! Model configuration: every constant the model leaves as a parameter,
//! with the defaults used throughout, JSON-loadable and echoed into outputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::ModeParams;
use crate::residual::{CompressionNoiseMode, ResidualParams};
use crate::system::FrucParams;
use crate::transform::TransformConfig;
use crate::video::VideoStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModeKind {
    Gaussian,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Minimal asymptotic inter-mode percentage (0-100 scale).
    pub p_inter_asymp_min: f64,
    pub gamma_c: f64,
    pub gamma_d: f64,
    /// ME error variance per axis for coded frames, in squared pels of the
    /// original raster. 1/48 is half-pel accuracy.
    pub sigma_dx2: f64,
    pub sigma_dy2: f64,
    /// ME error variance per axis for interpolated (absent) frames, squared
    /// pels. Defaults to 4x the coded-frame value.
    pub sigma_dx_abs2: Option<f64>,
    pub sigma_dy_abs2: Option<f64>,
    /// Temporally-local noise of interpolated frames.
    pub sigma_wj2: f64,
    /// Temporal memory factor.
    #[serde(rename = "L")]
    pub temporal_memory: f64,
    /// Skip-mode energy penalty, >= 1.
    pub gamma_skip: f64,
    /// Quantizer constant K in [1, 3].
    pub k_quant: f64,
    /// Prediction-to-transform dimension ratio.
    pub beta: u32,
    /// Transform block dimension; beta * d_trans must equal `block`.
    pub d_trans: u32,
    /// Row-major quantization weights, d_trans x d_trans. Uniform when absent.
    pub q_weight: Option<Vec<f64>>,
    /// Retained coefficient indices (zero-based). Full matrix when absent.
    pub omega: Option<Vec<(u32, u32)>>,
    pub compression_noise_mode: NoiseModeKind,
    /// Exponent of the empirical compression-noise curve beta * r^-alpha.
    pub rd_alpha: Option<f64>,
    pub rd_beta: Option<f64>,
    /// Close the compression-noise loop by fixed-point iteration instead of
    /// the one-shot estimator.
    pub fixed_point: bool,
    /// Prediction block (macroblock) side in pixels.
    pub block: u32,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            p_inter_asymp_min: 85.0,
            gamma_c: 0.3,
            gamma_d: 20.0,
            sigma_dx2: 1.0 / 48.0,
            sigma_dy2: 1.0 / 48.0,
            sigma_dx_abs2: None,
            sigma_dy_abs2: None,
            sigma_wj2: 0.0,
            temporal_memory: 100.0,
            gamma_skip: 2.0,
            k_quant: 1.5,
            beta: 4,
            d_trans: 4,
            q_weight: None,
            omega: None,
            compression_noise_mode: NoiseModeKind::Gaussian,
            rd_alpha: None,
            rd_beta: None,
            fixed_point: false,
            block: 16,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        self.mode_params().validate()?;
        for (name, v) in [
            ("sigma_dx2", self.sigma_dx2),
            ("sigma_dy2", self.sigma_dy2),
            ("sigma_wj2", self.sigma_wj2),
            ("L", self.temporal_memory),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::validation(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("sigma_dx_abs2", self.sigma_dx_abs2),
            ("sigma_dy_abs2", self.sigma_dy_abs2),
        ] {
            if let Some(v) = v {
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::validation(format!(
                        "{name} must be nonnegative, got {v}"
                    )));
                }
            }
        }
        if self.gamma_skip.is_nan() || self.gamma_skip < 1.0 {
            return Err(Error::validation(format!(
                "gamma_skip must be >= 1, got {}",
                self.gamma_skip
            )));
        }
        if !(1.0..=3.0).contains(&self.k_quant) {
            return Err(Error::validation(format!(
                "k_quant must lie in [1, 3], got {}",
                self.k_quant
            )));
        }
        if self.block == 0 {
            return Err(Error::validation("block must be positive"));
        }
        if self.beta * self.d_trans != self.block {
            return Err(Error::validation(format!(
                "beta ({}) * d_trans ({}) must equal the prediction block ({})",
                self.beta, self.d_trans, self.block
            )));
        }
        self.transform_config()?;
        self.noise_mode()?;
        Ok(())
    }

    pub fn mode_params(&self) -> ModeParams {
        ModeParams {
            p_inter_asymp_min: self.p_inter_asymp_min,
            gamma_c: self.gamma_c,
            gamma_d: self.gamma_d,
        }
    }

    /// Residual parameters bound to the original raster of `stats`.
    pub fn residual_params(&self, stats: &VideoStats) -> ResidualParams {
        ResidualParams::from_pel_units(
            self.sigma_dx2,
            self.sigma_dy2,
            stats.width,
            stats.height,
            self.temporal_memory,
            self.gamma_skip,
        )
    }

    pub fn fruc_params(&self) -> FrucParams {
        FrucParams {
            sigma_dx_abs2: self.sigma_dx_abs2.unwrap_or(4.0 * self.sigma_dx2),
            sigma_dy_abs2: self.sigma_dy_abs2.unwrap_or(4.0 * self.sigma_dy2),
            sigma_wj2: self.sigma_wj2,
            temporal_memory: self.temporal_memory,
        }
    }

    pub fn transform_config(&self) -> Result<TransformConfig> {
        let uniform;
        let weights: &[f64] = match &self.q_weight {
            Some(w) => w,
            None => {
                uniform = vec![1.0; (self.d_trans * self.d_trans) as usize];
                &uniform
            }
        };
        TransformConfig::new(self.beta, self.d_trans, weights, self.omega.clone())
    }

    pub fn noise_mode(&self) -> Result<CompressionNoiseMode> {
        match self.compression_noise_mode {
            NoiseModeKind::Gaussian => Ok(CompressionNoiseMode::Gaussian),
            NoiseModeKind::Empirical => match (self.rd_alpha, self.rd_beta) {
                (Some(alpha), Some(beta)) if alpha > 0.0 && beta > 0.0 => {
                    Ok(CompressionNoiseMode::Empirical { alpha, beta })
                }
                _ => Err(Error::validation(
                    "empirical compression-noise mode needs positive rd_alpha and rd_beta",
                )),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig =
            serde_json::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
