//! End-to-end system model: predicted distortion of coding a down-scaled
//! video, frame-rate up-conversion of the discarded frames, and grid search
//! over candidate scaling choices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::error::{Error, Result};
use crate::mode;
use crate::residual::{self, Axis, NoiseState};
use crate::slicing::{self, BitBudget, ScalingChoice};
use crate::spatial::{self, FramePsdParams};
use crate::transform;
use crate::video::VideoStats;

/// Peak sample value for PSNR (8-bit luma).
const PEAK: f64 = 255.0;

pub fn mse_to_psnr(mse: f64) -> f64 {
    10.0 * (PEAK * PEAK / mse).log10()
}

/// Parameters of motion-compensated interpolation of absent frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrucParams {
    /// ME error variance per axis when predicting an absent frame, in
    /// squared pels of the original raster.
    pub sigma_dx_abs2: f64,
    pub sigma_dy_abs2: f64,
    /// Temporally-local noise of the interpolated frame itself.
    pub sigma_wj2: f64,
    pub temporal_memory: f64,
}

/// MSE of the j-th interpolated frame when up-converting by `d_t`:
///
/// 1/2 [qvar d_t / F + mse_compression + sigma_wj2]
///   + (sdx_abs + sdy_abs) [(1 - rho_v) sigma_v2 + (L/F) qvar + mse_compression]
///
/// where F is the original frame rate and the available frames carry the
/// compression error as their temporally-local noise.
pub fn fruc_mse(
    stats: &VideoStats,
    params: &FrucParams,
    d_t: u32,
    j: u32,
    mse_compression: f64,
    f_rate_original: f64,
) -> Result<f64> {
    if d_t < 2 {
        return Err(Error::validation(
            "frame interpolation needs a temporal factor of at least 2",
        ));
    }
    if j < 1 || j > d_t - 1 {
        return Err(Error::validation(format!(
            "interpolated frame index {j} outside 1..={}",
            d_t - 1
        )));
    }
    if f_rate_original.is_nan() || f_rate_original <= 0.0 {
        return Err(Error::validation("frame rate must be positive"));
    }
    let motion_gap = stats.qvar * d_t as f64 / f_rate_original;
    let me_term = (params.sigma_dx_abs2 + params.sigma_dy_abs2)
        * ((1.0 - stats.rho_mean()) * stats.sigma_v2
            + params.temporal_memory / f_rate_original * stats.qvar
            + mse_compression);
    Ok(0.5 * (motion_gap + mse_compression + params.sigma_wj2) + me_term)
}

/// Full model output for one (scaling choice, bit budget) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdPrediction {
    pub d_m: f64,
    pub d_n: f64,
    pub d_t: u32,
    /// Factors actually realized after rounding to whole macroblock counts.
    pub d_m_effective: f64,
    pub d_n_effective: f64,
    pub m: u32,
    pub n: u32,
    /// Scaled frame rate.
    pub t: f64,
    pub bitrate_bps: f64,
    pub b_slice: f64,
    pub b_pixel: f64,
    pub p_inter: f64,
    pub p_skip: f64,
    /// PSD-truncation error of the spatial down-scaling.
    pub sigma_spatial_scaling2: f64,
    /// Compression-noise variance used inside the reference-frame noise.
    pub sigma_compression2: f64,
    pub sigma_fr2: f64,
    pub rho_rx: f64,
    pub rho_ry: f64,
    pub mse_inter: f64,
    pub mse_skip: f64,
    pub mse_compression: f64,
    /// Error of the frames that were coded (spatial path); equals
    /// mse_compression in this model.
    pub mse_spatial: f64,
    /// One entry per interpolated frame index j = 1..d_t-1.
    pub mse_fruc_per_frame: Vec<f64>,
    pub mse_fruc_mean: Option<f64>,
    pub mse_overall: f64,
    pub psnr_db: f64,
    pub flags: Vec<String>,
}

struct CompressionEval {
    sigma_fr2: f64,
    rho_rx: residual::RhoEstimate,
    rho_ry: residual::RhoEstimate,
    mse_inter: f64,
    mse_inter_clamped_low: bool,
    mse_inter_capped: bool,
    mse_skip: f64,
    mse_compression: f64,
}

/// Evaluates the full pipeline for one scaling choice and bit budget.
pub fn predict(
    stats: &VideoStats,
    choice: &ScalingChoice,
    budget: &BitBudget,
    cfg: &ModelConfig,
) -> Result<RdPrediction> {
    stats.validate().map_err(|e| e.in_stage("stats"))?;
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let mut flags: Vec<String> = Vec::new();

    // slicing and unit conversions
    let slicing = slicing::slicing_from_scaling(stats, choice, cfg.block)
        .map_err(|e| e.in_stage("slicing"))?;
    let b_slice = slicing::bits_per_slice(budget, &slicing);
    let b_pixel = slicing::bits_per_pixel(b_slice, cfg.block);
    let d_m_eff = slicing.effective_d_m(stats, cfg.block);
    let d_n_eff = slicing.effective_d_n(stats, cfg.block);
    if d_m_eff < 1.0 || d_n_eff < 1.0 {
        flags.push("effective_factor_below_one".into());
    }

    // spatial down-scaling noise at the effective factors
    let psd = FramePsdParams::from_stats(stats);
    let sigma_scaling2 = spatial::spatial_scaling_mse(&psd, d_m_eff, d_n_eff);

    // mode probabilities at the scaled frame rate
    let coeff = mode::mode_coefficients(&cfg.mode_params(), stats.qvar, slicing.t)
        .map_err(|e| e.in_stage("mode"))?;
    let p_inter = mode::p_inter(b_slice, &coeff);
    let p_skip = 1.0 - p_inter;

    let rp = cfg.residual_params(stats);
    let tcfg = cfg.transform_config().map_err(|e| e.in_stage("config"))?;
    let noise_mode = cfg.noise_mode().map_err(|e| e.in_stage("config"))?;

    // the coded raster the residual lives on
    let w_scaled = cfg.block as f64 * slicing.m as f64;
    let h_scaled = cfg.block as f64 * slicing.n as f64;

    let eval = |sigma_compression2: f64| -> Result<CompressionEval> {
        let noise = NoiseState::new(sigma_scaling2, sigma_compression2);
        let sigma_fr2 = residual::residual_variance(stats, &rp, &noise, slicing.t)
            .map_err(|e| e.in_stage("residual"))?;
        let rho_rx = residual::residual_rho(stats, &rp, &noise, slicing.t, Axis::X)
            .map_err(|e| e.in_stage("residual"))?;
        let rho_ry = residual::residual_rho(stats, &rp, &noise, slicing.t, Axis::Y)
            .map_err(|e| e.in_stage("residual"))?;
        let alpha_rx = spatial::alpha_from_rho(rho_rx.value, w_scaled);
        let alpha_ry = spatial::alpha_from_rho(rho_ry.value, h_scaled);
        let alloc = transform::allocate_bits(budget.bits_per_second, &slicing, p_inter, &tcfg)
            .map_err(|e| e.in_stage("bit_allocation"))?;
        let inter = transform::inter_mse(
            sigma_fr2,
            alpha_rx,
            alpha_ry,
            &tcfg,
            &slicing,
            &alloc,
            cfg.k_quant,
        )
        .map_err(|e| e.in_stage("inter_mse"))?;
        let mse_skip =
            residual::skip_mse(sigma_fr2, rp.gamma_skip).map_err(|e| e.in_stage("skip_mse"))?;
        // a real encoder would fall back to skip rather than code a worse block
        let cap = rp.gamma_skip * sigma_fr2;
        let (mse_inter, capped) = if inter.value > cap {
            (cap, true)
        } else {
            (inter.value, false)
        };
        let mse_compression = p_inter * mse_inter + p_skip * mse_skip;
        Ok(CompressionEval {
            sigma_fr2,
            rho_rx,
            rho_ry,
            mse_inter,
            mse_inter_clamped_low: inter.clamped_low,
            mse_inter_capped: capped,
            mse_skip,
            mse_compression,
        })
    };

    let mut sigma_compression2 = residual::compression_noise(&noise_mode, b_pixel, stats.sigma_v2)
        .map_err(|e| e.in_stage("compression_noise"))?;
    let mut out = eval(sigma_compression2)?;
    if cfg.fixed_point {
        let tol = 1e-6 * stats.sigma_v2.max(f64::MIN_POSITIVE);
        let mut converged = false;
        for _ in 0..50 {
            if (out.mse_compression - sigma_compression2).abs() < tol {
                converged = true;
                break;
            }
            sigma_compression2 = out.mse_compression;
            out = eval(sigma_compression2)?;
        }
        if !converged {
            flags.push("fixed_point_not_converged".into());
        }
    }
    if out.rho_rx.clamped {
        flags.push("rho_rx_clamped".into());
    }
    if out.rho_ry.clamped {
        flags.push("rho_ry_clamped".into());
    }
    if out.mse_inter_clamped_low {
        flags.push("inter_mse_clamped_low".into());
    }
    if out.mse_inter_capped {
        flags.push("inter_mse_capped_at_skip".into());
    }

    // frames that were coded carry the compression error
    let mse_spatial = out.mse_compression;

    // discarded frames are interpolated from the coded ones
    let fp = cfg.fruc_params();
    let mut mse_fruc_per_frame = Vec::with_capacity(choice.d_t.saturating_sub(1) as usize);
    for j in 1..choice.d_t {
        let v = fruc_mse(stats, &fp, choice.d_t, j, mse_spatial, stats.frame_rate)
            .map_err(|e| e.in_stage("fruc"))?;
        mse_fruc_per_frame.push(v);
    }
    let mse_fruc_mean = if mse_fruc_per_frame.is_empty() {
        None
    } else {
        Some(mse_fruc_per_frame.iter().sum::<f64>() / mse_fruc_per_frame.len() as f64)
    };

    let mse_overall = match mse_fruc_mean {
        None => mse_spatial,
        Some(fruc_mean) => {
            let d_t = choice.d_t as f64;
            mse_spatial / d_t + (d_t - 1.0) / d_t * fruc_mean
        }
    };

    Ok(RdPrediction {
        d_m: choice.d_m,
        d_n: choice.d_n,
        d_t: choice.d_t,
        d_m_effective: d_m_eff,
        d_n_effective: d_n_eff,
        m: slicing.m,
        n: slicing.n,
        t: slicing.t,
        bitrate_bps: budget.bits_per_second,
        b_slice,
        b_pixel,
        p_inter,
        p_skip,
        sigma_spatial_scaling2: sigma_scaling2,
        sigma_compression2,
        sigma_fr2: out.sigma_fr2,
        rho_rx: out.rho_rx.value,
        rho_ry: out.rho_ry.value,
        mse_inter: out.mse_inter,
        mse_skip: out.mse_skip,
        mse_compression: out.mse_compression,
        mse_spatial,
        mse_fruc_per_frame,
        mse_fruc_mean,
        mse_overall,
        psnr_db: mse_to_psnr(mse_overall),
        flags,
    })
}

/// Candidate grid of scaling choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    /// Horizontal factors; also vertical unless `vertical` is given.
    pub spatial: Vec<f64>,
    pub temporal: Vec<u32>,
    /// Independent vertical factors (cross product with `spatial`).
    pub vertical: Option<Vec<f64>>,
}

impl CandidateSet {
    pub fn symmetric(spatial: Vec<f64>, temporal: Vec<u32>) -> Self {
        CandidateSet {
            spatial,
            temporal,
            vertical: None,
        }
    }

    /// Expands to concrete choices, sorted by (d_t, d_m, d_n) and deduplicated.
    pub fn expand(&self) -> Result<Vec<ScalingChoice>> {
        if self.spatial.is_empty() || self.temporal.is_empty() {
            return Err(Error::validation("candidate set must not be empty"));
        }
        let mut choices = Vec::new();
        for &d_t in &self.temporal {
            for &d_m in &self.spatial {
                match &self.vertical {
                    Some(vertical) => {
                        for &d_n in vertical {
                            choices.push(ScalingChoice::new(d_m, d_n, d_t)?);
                        }
                    }
                    None => choices.push(ScalingChoice::new(d_m, d_m, d_t)?),
                }
            }
        }
        choices.sort_by(|a, b| {
            (a.d_t, a.d_m, a.d_n)
                .partial_cmp(&(b.d_t, b.d_m, b.d_n))
                .expect("validated factors are finite")
        });
        choices.dedup();
        Ok(choices)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateFailure {
    pub choice: ScalingChoice,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub bitrate_bps: f64,
    pub best: RdPrediction,
    pub grid: Vec<RdPrediction>,
    pub failures: Vec<CandidateFailure>,
}

/// Exhaustively evaluates the candidate grid at one budget and returns the
/// choice minimizing the overall MSE. Ties go to the smaller d_t, then the
/// smaller d_m (the grid is evaluated in that order).
pub fn optimize(
    stats: &VideoStats,
    budget: &BitBudget,
    candidates: &CandidateSet,
    cfg: &ModelConfig,
) -> Result<OptimizeReport> {
    let choices = candidates.expand()?;
    let mut grid = Vec::new();
    let mut failures = Vec::new();
    for choice in &choices {
        match predict(stats, choice, budget, cfg) {
            Ok(p) => grid.push(p),
            Err(e) => failures.push(CandidateFailure {
                choice: *choice,
                error: e.to_string(),
            }),
        }
    }
    if grid.is_empty() {
        let detail: Vec<String> = failures
            .iter()
            .map(|f| {
                format!(
                    "(d_m {}, d_n {}, d_t {}): {}",
                    f.choice.d_m, f.choice.d_n, f.choice.d_t, f.error
                )
            })
            .collect();
        return Err(Error::validation(format!(
            "all candidates failed: {}",
            detail.join("; ")
        )));
    }
    let best = grid
        .iter()
        .min_by(|a, b| a.mse_overall.total_cmp(&b.mse_overall))
        .expect("grid is nonempty")
        .clone();
    Ok(OptimizeReport {
        bitrate_bps: budget.bits_per_second,
        best,
        grid,
        failures,
    })
}

/// One evaluated point of a sweep. Per-point failures are recorded, not
/// propagated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub bitrate_bps: f64,
    pub choice: ScalingChoice,
    pub outcome: std::result::Result<RdPrediction, String>,
}

/// Evaluates every (bit-rate, candidate) pair, rows ordered by
/// (bit-rate, d_t, d_m, d_n). Bit-rates must be positive and strictly
/// ascending. The parallel path evaluates points independently and collects
/// them in index order, so output is identical to the serial path.
pub fn sweep(
    stats: &VideoStats,
    bitrates: &[f64],
    candidates: &CandidateSet,
    cfg: &ModelConfig,
    parallel: bool,
) -> Result<Vec<SweepPoint>> {
    if bitrates.is_empty() {
        return Err(Error::validation("bit-rate range must not be empty"));
    }
    for pair in bitrates.windows(2) {
        if pair[0].is_nan() || pair[1].is_nan() || pair[0] >= pair[1] {
            return Err(Error::validation("bit-rates must be strictly ascending"));
        }
    }
    let choices = candidates.expand()?;
    let jobs: Vec<(f64, ScalingChoice)> = bitrates
        .iter()
        .flat_map(|&b| choices.iter().map(move |&c| (b, c)))
        .collect();
    let run = |&(bitrate, choice): &(f64, ScalingChoice)| -> SweepPoint {
        let outcome = BitBudget::new(bitrate)
            .and_then(|budget| predict(stats, &choice, &budget, cfg))
            .map_err(|e| e.to_string());
        SweepPoint {
            bitrate_bps: bitrate,
            choice,
            outcome,
        }
    };
    let points = if parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    Ok(points)
}
