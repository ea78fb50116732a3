//! Output rendering. Everything here is deterministic: structs serialize in
//! declaration order, composed objects use serde_json's sorted maps, and
//! floats print in shortest round-trip form.

use serde_json::{json, Value};

use stscale::config::ModelConfig;
use stscale::system::{OptimizeReport, RdPrediction, SweepPoint};
use stscale::video::{MotionSearchParams, VideoStats};

use crate::CliError;

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json rendering cannot fail");
    text.push('\n');
    text
}

pub fn stats_json(
    stats: &VideoStats,
    sigma_hat_12: f64,
    flags: &[String],
    search: &MotionSearchParams,
    config: &ModelConfig,
) -> Result<String, CliError> {
    let mut map = match serde_json::to_value(stats).expect("stats serialize") {
        Value::Object(map) => map,
        _ => unreachable!("stats serialize to an object"),
    };
    map.insert("sigma_hat_12".into(), json!(sigma_hat_12));
    map.insert("flags".into(), json!(flags));
    map.insert(
        "config".into(),
        json!({
            "pairs": search.max_pairs,
            "search_range": search.search_range,
            "block": search.block,
            "sigma_dx2": config.sigma_dx2,
            "sigma_dy2": config.sigma_dy2,
            "L": config.temporal_memory,
        }),
    );
    Ok(pretty(&Value::Object(map)))
}

pub fn predict_json(
    config: &ModelConfig,
    stats: &VideoStats,
    prediction: &RdPrediction,
) -> Result<String, CliError> {
    Ok(pretty(&json!({
        "config": config,
        "stats": stats,
        "prediction": prediction,
    })))
}

pub fn optimize_json(
    config: &ModelConfig,
    stats: &VideoStats,
    report: &OptimizeReport,
) -> Result<String, CliError> {
    Ok(pretty(&json!({
        "config": config,
        "stats": stats,
        "report": report,
    })))
}

fn csv_field(v: f64) -> String {
    format!("{v}")
}

fn sanitize(text: &str) -> String {
    text.replace(['\n', '\r'], " ").replace(',', ";")
}

pub const SWEEP_HEADER: &str = "bitrate_bps,d_m,d_n,d_t,b_slice,p_inter,mse_spatial,\
mse_compression,mse_fruc_mean,mse_overall,psnr_db,flags";

pub fn sweep_csv(
    config: &ModelConfig,
    stats: &VideoStats,
    points: &[SweepPoint],
) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&format!(
        "# config: {}\n",
        serde_json::to_string(config).expect("config serialize")
    ));
    out.push_str(&format!(
        "# stats: {}\n",
        serde_json::to_string(stats).expect("stats serialize")
    ));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for point in points {
        match &point.outcome {
            Ok(p) => {
                let fruc = p.mse_fruc_mean.map(csv_field).unwrap_or_default();
                let flags = if p.flags.is_empty() {
                    "-".to_string()
                } else {
                    p.flags.join(";")
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    csv_field(p.bitrate_bps),
                    csv_field(p.d_m),
                    csv_field(p.d_n),
                    p.d_t,
                    csv_field(p.b_slice),
                    csv_field(p.p_inter),
                    csv_field(p.mse_spatial),
                    csv_field(p.mse_compression),
                    fruc,
                    csv_field(p.mse_overall),
                    csv_field(p.psnr_db),
                    flags,
                ));
            }
            Err(message) => {
                out.push_str(&format!(
                    "{},{},{},{},,,,,,,,error: {}\n",
                    csv_field(point.bitrate_bps),
                    csv_field(point.choice.d_m),
                    csv_field(point.choice.d_n),
                    point.choice.d_t,
                    sanitize(message),
                ));
            }
        }
    }
    Ok(out)
}
