//! Command-line front end: statistics estimation, single-point prediction,
//! scaling optimization, and rate sweeps.
//!
//! Exit codes: 0 success, 2 validation, 3 i/o, 4 numeric failure.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stscale::config::ModelConfig;
use stscale::slicing::{BitBudget, ScalingChoice};
use stscale::system::{self, CandidateSet};
use stscale::video::{
    estimate_prediction_error, estimate_qvar, estimate_spatial_stats, load_raw_video,
    MotionSearchParams, QvarParams, VideoStats,
};

#[derive(Debug, Parser)]
#[command(
    name = "stscale",
    version,
    about = "Rate-distortion model for video coding with spatio-temporal down-scaling"
)]
struct Cli {
    /// JSON model-configuration file; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate second-order statistics from a raw 8-bit luma file.
    EstimateStats(EstimateStatsArgs),
    /// Predict distortion for one scaling choice at one bit-rate.
    Predict(PredictArgs),
    /// Pick the best scaling choice from a candidate grid at one bit-rate.
    Optimize(OptimizeArgs),
    /// Evaluate a candidate grid across a range of bit-rates, as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct EstimateStatsArgs {
    /// Raw video file: concatenated row-major grayscale frames.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    width: u32,
    #[arg(long)]
    height: u32,
    #[arg(long)]
    fps: f64,
    /// Consecutive frame pairs averaged for the prediction-error estimate.
    #[arg(long, default_value_t = 10)]
    pairs: usize,
    /// Motion search half-window in pixels.
    #[arg(long, default_value_t = 16)]
    search_range: u32,
    /// Block size for motion estimation; defaults to the configured
    /// macroblock size.
    #[arg(long)]
    block: Option<u32>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// VideoStats JSON produced by estimate-stats.
    #[arg(long)]
    stats: PathBuf,
    /// Bit-rate in bps; k/M suffixes accepted (180k, 1.25M).
    #[arg(long)]
    bitrate: String,
    #[arg(long, default_value_t = 1.0)]
    dm: f64,
    /// Vertical factor; defaults to --dm.
    #[arg(long)]
    dn: Option<f64>,
    #[arg(long, default_value_t = 1)]
    dt: u32,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    stats: PathBuf,
    #[arg(long)]
    bitrate: String,
    /// Candidate spatial factors (applied to width and height).
    #[arg(long, default_value = "1,2,3")]
    dms: String,
    /// Candidate temporal factors.
    #[arg(long, default_value = "1,2,3")]
    dts: String,
    /// Independent vertical candidates (cross product with --dms).
    #[arg(long)]
    dns: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    stats: PathBuf,
    /// Comma list of bit-rates, or lo:hi:n for n log-spaced points.
    #[arg(long)]
    bitrates: String,
    #[arg(long, default_value = "1,2,3")]
    dms: String,
    #[arg(long, default_value = "1,2,3")]
    dts: String,
    #[arg(long)]
    dns: Option<String>,
    #[arg(long)]
    serial: bool,
}

#[derive(Debug)]
enum CliError {
    Model(stscale::Error),
    Flag(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // the library's Display strings already embed their sources
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Flag(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "i/o on {}: {source}", path.display()),
        }
    }
}

impl From<stscale::Error> for CliError {
    fn from(e: stscale::Error) -> Self {
        CliError::Model(e)
    }
}

fn model_exit_code(e: &stscale::Error) -> u8 {
    use stscale::Error::*;
    match e {
        Validation(_) | NoInterSlices => 2,
        Io { .. } | FileSize { .. } => 3,
        Numeric(_) => 4,
        Stage { source, .. } => model_exit_code(source),
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(e) => model_exit_code(e),
            CliError::Flag(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = load_config(cli.config.as_deref())?;
    let rendered = match &cli.command {
        Command::EstimateStats(args) => cmd_estimate_stats(args, &config)?,
        Command::Predict(args) => cmd_predict(args, &config)?,
        Command::Optimize(args) => cmd_optimize(args, &config)?,
        Command::Sweep(args) => cmd_sweep(args, &config)?,
    };
    emit(cli.out.as_deref(), &rendered)
}

fn load_config(path: Option<&Path>) -> Result<ModelConfig, CliError> {
    match path {
        None => Ok(ModelConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            Ok(ModelConfig::from_json(&text)?)
        }
    }
}

fn load_stats(path: &Path) -> Result<VideoStats, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let stats: VideoStats = serde_json::from_str(&text)
        .map_err(|e| CliError::Flag(format!("stats file {}: {e}", path.display())))?;
    stats.validate()?;
    Ok(stats)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// "180k" -> 180000, "1.25M" -> 1.25e6, plain numbers pass through.
fn parse_bitrate(text: &str) -> Result<f64, CliError> {
    let trimmed = text.trim();
    let (digits, factor) = match trimmed.chars().last() {
        Some('k') | Some('K') => (&trimmed[..trimmed.len() - 1], 1e3),
        Some('M') => (&trimmed[..trimmed.len() - 1], 1e6),
        Some('G') => (&trimmed[..trimmed.len() - 1], 1e9),
        _ => (trimmed, 1.0),
    };
    let value: f64 = digits
        .parse()
        .map_err(|_| CliError::Flag(format!("cannot parse bit-rate '{text}'")))?;
    if value <= 0.0 || !value.is_finite() {
        return Err(CliError::Flag(format!(
            "bit-rate must be positive: '{text}'"
        )));
    }
    Ok(value * factor)
}

/// Comma list of bit-rates, or "lo:hi:n" for n log-spaced points.
fn parse_bitrates(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let lo = parse_bitrate(parts[0])?;
        let hi = parse_bitrate(parts[1])?;
        let n: usize = parts[2]
            .parse()
            .map_err(|_| CliError::Flag(format!("cannot parse point count '{}'", parts[2])))?;
        if n < 2 || lo >= hi || lo.is_nan() || hi.is_nan() {
            return Err(CliError::Flag(
                "log range needs lo < hi and at least 2 points".into(),
            ));
        }
        let ratio = hi / lo;
        return Ok((0..n)
            .map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64))
            .collect());
    }
    text.split(',').map(parse_bitrate).collect()
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Flag(format!("cannot parse {flag} entry '{s}'")))
        })
        .collect()
}

fn parse_u32_list(text: &str, flag: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Flag(format!("cannot parse {flag} entry '{s}'")))
        })
        .collect()
}

fn candidate_set(dms: &str, dts: &str, dns: Option<&str>) -> Result<CandidateSet, CliError> {
    Ok(CandidateSet {
        spatial: parse_f64_list(dms, "--dms")?,
        temporal: parse_u32_list(dts, "--dts")?,
        vertical: dns.map(|s| parse_f64_list(s, "--dns")).transpose()?,
    })
}

fn cmd_estimate_stats(args: &EstimateStatsArgs, config: &ModelConfig) -> Result<String, CliError> {
    if args.pairs == 0 {
        return Err(CliError::Flag("--pairs must be positive".into()));
    }
    let video = load_raw_video(&args.input, args.width, args.height, args.fps)?;
    let spatial = estimate_spatial_stats(&video);
    let search = MotionSearchParams {
        block: args.block.unwrap_or(config.block),
        search_range: args.search_range,
        max_pairs: args.pairs,
    };
    let sigma_hat_12 = estimate_prediction_error(&video, &search)?;
    let qvar_params = QvarParams {
        sigma_dx2: config.sigma_dx2,
        sigma_dy2: config.sigma_dy2,
        temporal_memory: config.temporal_memory,
    };
    let qvar = estimate_qvar(sigma_hat_12, &spatial, args.fps, &qvar_params)?;

    let mut flags = Vec::new();
    if spatial.degenerate {
        flags.push("spatial_stats_degenerate".to_string());
    }
    if qvar.clamped {
        flags.push("qvar_clamped".to_string());
    }
    for flag in &flags {
        eprintln!("warning: {flag}");
    }

    let stats = VideoStats {
        sigma_v2: spatial.sigma_v2,
        rho_vx: spatial.rho_vx,
        rho_vy: spatial.rho_vy,
        qvar: qvar.value,
        width: args.width,
        height: args.height,
        frame_rate: args.fps,
    };
    output::stats_json(&stats, sigma_hat_12, &flags, &search, config)
}

fn cmd_predict(args: &PredictArgs, config: &ModelConfig) -> Result<String, CliError> {
    let stats = load_stats(&args.stats)?;
    let budget = BitBudget::new(parse_bitrate(&args.bitrate)?)?;
    let choice = ScalingChoice::new(args.dm, args.dn.unwrap_or(args.dm), args.dt)?;
    let prediction = system::predict(&stats, &choice, &budget, config)?;
    output::predict_json(config, &stats, &prediction)
}

fn cmd_optimize(args: &OptimizeArgs, config: &ModelConfig) -> Result<String, CliError> {
    let stats = load_stats(&args.stats)?;
    let budget = BitBudget::new(parse_bitrate(&args.bitrate)?)?;
    let candidates = candidate_set(&args.dms, &args.dts, args.dns.as_deref())?;
    let report = system::optimize(&stats, &budget, &candidates, config)?;
    output::optimize_json(config, &stats, &report)
}

fn cmd_sweep(args: &SweepArgs, config: &ModelConfig) -> Result<String, CliError> {
    let stats = load_stats(&args.stats)?;
    let bitrates = parse_bitrates(&args.bitrates)?;
    let candidates = candidate_set(&args.dms, &args.dts, args.dns.as_deref())?;
    let points = system::sweep(&stats, &bitrates, &candidates, config, !args.serial)?;
    output::sweep_csv(config, &stats, &points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitrate_suffixes() {
        assert_eq!(parse_bitrate("180k").unwrap(), 180000.0);
        assert_eq!(parse_bitrate("1.25M").unwrap(), 1.25e6);
        assert_eq!(parse_bitrate("2G").unwrap(), 2e9);
        assert_eq!(parse_bitrate("640000").unwrap(), 640000.0);
        assert!(parse_bitrate("fast").is_err());
        assert!(parse_bitrate("-3k").is_err());
    }

    #[test]
    fn bitrate_log_range() {
        let v = parse_bitrates("100k:10M:3").unwrap();
        assert_eq!(v.len(), 3);
        assert!((v[0] - 1e5).abs() < 1e-6);
        assert!((v[1] - 1e6).abs() < 1e-3);
        assert!((v[2] - 1e7).abs() < 1e-2);
    }

    #[test]
    fn bitrate_comma_list() {
        let v = parse_bitrates("100k,1M").unwrap();
        assert_eq!(v, vec![1e5, 1e6]);
    }
}
