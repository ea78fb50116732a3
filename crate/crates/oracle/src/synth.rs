//! Synthetic video material with known statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Zero-mean separable AR(1) field with autocorrelation
/// `sigma2 * rho^|dx| * rho^|dy|`, produced by filtering white noise along
/// rows and then columns.
pub fn ar1_field(
    width: usize,
    height: usize,
    rho: f64,
    sigma2: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    assert!(rho.abs() < 1.0, "ar1_field needs |rho| < 1");
    let innov = (1.0 - rho * rho).sqrt();
    let mut field: Vec<f64> = (0..width * height)
        .map(|_| StandardNormal.sample(rng))
        .collect();
    for y in 0..height {
        let row = y * width;
        for x in 1..width {
            field[row + x] = rho * field[row + x - 1] + innov * field[row + x];
        }
    }
    for y in 1..height {
        for x in 0..width {
            field[y * width + x] = rho * field[(y - 1) * width + x] + innov * field[y * width + x];
        }
    }
    let scale = sigma2.sqrt();
    for v in field.iter_mut() {
        *v *= scale;
    }
    field
}

/// Concatenated 8-bit luma frames of independent AR(1) fields, offset to 128.
///
/// Clipping at [0, 255] slightly shrinks the realized variance; callers that
/// assert recovery tolerances account for that.
pub fn ar1_video_bytes(
    width: usize,
    height: usize,
    frames: usize,
    rho: f64,
    sigma2: f64,
    seed: u64,
) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(width * height * frames);
    for _ in 0..frames {
        let field = ar1_field(width, height, rho, sigma2, &mut rng);
        out.extend(
            field
                .iter()
                .map(|&v| (128.0 + v).round().clamp(0.0, 255.0) as u8),
        );
    }
    out
}

/// Circularly shifted copy of a frame: content moves by (+dx, +dy).
pub fn shift_frame_circular(
    frame: &[u8],
    width: usize,
    height: usize,
    dx: i32,
    dy: i32,
) -> Vec<u8> {
    assert_eq!(frame.len(), width * height);
    let mut out = vec![0u8; frame.len()];
    for y in 0..height {
        let sy = (y as i32 - dy).rem_euclid(height as i32) as usize;
        for x in 0..width {
            let sx = (x as i32 - dx).rem_euclid(width as i32) as usize;
            out[y * width + x] = frame[sy * width + sx];
        }
    }
    out
}
