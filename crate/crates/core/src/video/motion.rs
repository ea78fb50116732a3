//! Full-search integer-pel block matching for the prediction-error estimate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::video::RawVideo;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MotionSearchParams {
    /// Square block side in pixels.
    pub block: u32,
    /// Search window half-width, in pixels, around the co-located block.
    pub search_range: u32,
    /// Maximum number of consecutive frame pairs averaged.
    pub max_pairs: usize,
}

impl Default for MotionSearchParams {
    fn default() -> Self {
        MotionSearchParams {
            block: 16,
            search_range: 16,
            max_pairs: 10,
        }
    }
}

/// Best match found for one block of the current frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockMatch {
    /// Top-left pixel of the block in the current frame.
    pub x: u32,
    pub y: u32,
    /// Displacement of the matched reference block.
    pub dx: i32,
    pub dy: i32,
    pub ssd: u64,
    /// Mean squared residual over the block.
    pub mse: f64,
}

#[allow(clippy::too_many_arguments)]
fn block_ssd(
    reference: &[u8],
    current: &[u8],
    width: usize,
    cur_x: usize,
    cur_y: usize,
    ref_x: usize,
    ref_y: usize,
    block: usize,
    abort_at: u64,
) -> u64 {
    let mut ssd = 0u64;
    for row in 0..block {
        let cur_row = (cur_y + row) * width + cur_x;
        let ref_row = (ref_y + row) * width + ref_x;
        for col in 0..block {
            let d = current[cur_row + col] as i64 - reference[ref_row + col] as i64;
            ssd += (d * d) as u64;
        }
        if ssd >= abort_at {
            break;
        }
    }
    ssd
}

/// Full-search SSD matching of every block of `current` against `reference`.
///
/// Candidate displacements outside the frame are clipped to valid positions.
/// Ties are broken by the smaller displacement magnitude, then by candidate
/// scan order (dy, then dx, ascending).
pub fn block_match_pair(
    reference: &[u8],
    current: &[u8],
    width: u32,
    height: u32,
    params: &MotionSearchParams,
) -> Result<Vec<BlockMatch>> {
    let block = params.block as usize;
    let (w, h) = (width as usize, height as usize);
    if block == 0 || w % block != 0 || h % block != 0 {
        return Err(Error::validation(format!(
            "block size {block} must divide frame dimensions {w}x{h}"
        )));
    }
    if reference.len() != w * h || current.len() != w * h {
        return Err(Error::validation("frame buffer does not match dimensions"));
    }
    let range = params.search_range as i32;
    let blocks_x = w / block;
    let blocks_y = h / block;

    let matches: Vec<BlockMatch> = (0..blocks_x * blocks_y)
        .into_par_iter()
        .map(|index| {
            let bx = (index % blocks_x) * block;
            let by = (index / blocks_x) * block;
            let dy_lo = (-range).max(-(by as i32));
            let dy_hi = range.min((h - block - by) as i32);
            let dx_lo = (-range).max(-(bx as i32));
            let dx_hi = range.min((w - block - bx) as i32);

            let mut best_ssd = u64::MAX;
            let mut best_mag = i64::MAX;
            let mut best = (0i32, 0i32);
            for dy in dy_lo..=dy_hi {
                for dx in dx_lo..=dx_hi {
                    let ssd = block_ssd(
                        reference,
                        current,
                        w,
                        bx,
                        by,
                        (bx as i32 + dx) as usize,
                        (by as i32 + dy) as usize,
                        block,
                        best_ssd,
                    );
                    let mag = (dx as i64) * (dx as i64) + (dy as i64) * (dy as i64);
                    if ssd < best_ssd || (ssd == best_ssd && mag < best_mag) {
                        best_ssd = ssd;
                        best_mag = mag;
                        best = (dx, dy);
                    }
                }
            }
            BlockMatch {
                x: bx as u32,
                y: by as u32,
                dx: best.0,
                dy: best.1,
                ssd: best_ssd,
                mse: best_ssd as f64 / (block * block) as f64,
            }
        })
        .collect();
    Ok(matches)
}

/// Mean squared MC-prediction residual between consecutive frames,
/// averaged over up to `max_pairs` pairs.
pub fn estimate_prediction_error(video: &RawVideo, params: &MotionSearchParams) -> Result<f64> {
    if video.frame_count() < 2 {
        return Err(Error::validation("need at least 2 frames"));
    }
    let pairs = params.max_pairs.min(video.frame_count() - 1);
    if pairs == 0 {
        return Err(Error::validation("max_pairs must be positive"));
    }
    let block = params.block as usize;
    let mut total_ssd: u64 = 0;
    let mut total_blocks: u64 = 0;
    for t in 0..pairs {
        let matches = block_match_pair(
            video.frame(t),
            video.frame(t + 1),
            video.width(),
            video.height(),
            params,
        )?;
        total_ssd += matches.iter().map(|m| m.ssd).sum::<u64>();
        total_blocks += matches.len() as u64;
    }
    Ok(total_ssd as f64 / (total_blocks as f64 * (block * block) as f64))
}
