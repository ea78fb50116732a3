//! Down-scaling factors, slicing parameters, and bit-rate unit conversions.
//!
//! A "slice" here is one macroblock-sized region of the unit-cube signal
//! model; M and N count macroblocks per scaled frame and T is the scaled
//! frame rate, so M*N*T is the number of slices coded per second.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::VideoStats;

/// Candidate down-scaling factors for width, height and frame rate.
///
/// The temporal factor is an integer: interpolated frames are indexed
/// j = 1..d_t-1 when up-converting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingChoice {
    pub d_m: f64,
    pub d_n: f64,
    pub d_t: u32,
}

impl ScalingChoice {
    pub fn new(d_m: f64, d_n: f64, d_t: u32) -> Result<Self> {
        let choice = ScalingChoice { d_m, d_n, d_t };
        choice.validate()?;
        Ok(choice)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("d_m", self.d_m), ("d_n", self.d_n)] {
            if d < 1.0 || !d.is_finite() {
                return Err(Error::validation(format!("{name} must be >= 1, got {d}")));
            }
        }
        if self.d_t < 1 {
            return Err(Error::validation("d_t must be >= 1"));
        }
        Ok(())
    }
}

/// Slicing of the scaled video: macroblock counts per frame and the scaled
/// frame rate. The frame rate need not be an integer (e.g. 50 fps scaled by
/// 3), which keeps the slice count per second continuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicingParams {
    pub m: u32,
    pub n: u32,
    pub t: f64,
}

impl SlicingParams {
    pub fn slices_per_second(&self) -> f64 {
        self.m as f64 * self.n as f64 * self.t
    }

    /// Down-scaling factor actually realized after rounding M to a whole
    /// macroblock count.
    pub fn effective_d_m(&self, stats: &VideoStats, block: u32) -> f64 {
        stats.width as f64 / (block as f64 * self.m as f64)
    }

    pub fn effective_d_n(&self, stats: &VideoStats, block: u32) -> f64 {
        stats.height as f64 / (block as f64 * self.n as f64)
    }
}

/// Total bit-rate in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitBudget {
    pub bits_per_second: f64,
}

impl BitBudget {
    pub fn new(bits_per_second: f64) -> Result<Self> {
        if bits_per_second <= 0.0 || !bits_per_second.is_finite() {
            return Err(Error::validation(format!(
                "bit budget must be positive, got {bits_per_second}"
            )));
        }
        Ok(BitBudget { bits_per_second })
    }
}

/// Slicing parameters induced by a scaling choice.
///
/// M and N are rounded to the nearest whole macroblock count (at least 1 is
/// required; rounding to 0 is an error). The effective factors can be read
/// back from the result.
pub fn slicing_from_scaling(
    stats: &VideoStats,
    choice: &ScalingChoice,
    block: u32,
) -> Result<SlicingParams> {
    choice.validate()?;
    if block == 0 {
        return Err(Error::validation("block size must be positive"));
    }
    let m = (stats.width as f64 / (block as f64 * choice.d_m)).round();
    let n = (stats.height as f64 / (block as f64 * choice.d_n)).round();
    if m < 1.0 {
        return Err(Error::validation(format!(
            "horizontal slice count rounds to 0 (width {}, block {block}, d_m {})",
            stats.width, choice.d_m
        )));
    }
    if n < 1.0 {
        return Err(Error::validation(format!(
            "vertical slice count rounds to 0 (height {}, block {block}, d_n {})",
            stats.height, choice.d_n
        )));
    }
    let t = stats.frame_rate / choice.d_t as f64;
    if t < 1.0 {
        return Err(Error::validation(format!(
            "scaled frame rate {t} is below 1 frame/s (frame rate {}, d_t {})",
            stats.frame_rate, choice.d_t
        )));
    }
    Ok(SlicingParams {
        m: m as u32,
        n: n as u32,
        t,
    })
}

/// Bits available per slice: B_second / (M N T).
pub fn bits_per_slice(budget: &BitBudget, slicing: &SlicingParams) -> f64 {
    budget.bits_per_second / slicing.slices_per_second()
}

/// Bits per pixel of the coded raster: B_slice / block^2.
pub fn bits_per_pixel(b_slice: f64, block: u32) -> f64 {
    b_slice / (block as f64 * block as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(width: u32, height: u32, frame_rate: f64) -> VideoStats {
        VideoStats {
            sigma_v2: 2300.0,
            rho_vx: 0.95,
            rho_vy: 0.95,
            qvar: 250.0,
            width,
            height,
            frame_rate,
        }
    }

    #[test]
    fn worked_example_720_by_three() {
        let s = stats(720, 720, 50.0);
        let choice = ScalingChoice::new(3.0, 3.0, 1).unwrap();
        let slicing = slicing_from_scaling(&s, &choice, 16).unwrap();
        assert_eq!(slicing.m, 15);
        assert_eq!(slicing.n, 15);
        assert_eq!(slicing.t, 50.0);
        assert_eq!(slicing.effective_d_m(&s, 16), 3.0);
    }

    #[test]
    fn identity_scaling_returns_original_slicing() {
        let s = stats(720, 720, 50.0);
        let slicing =
            slicing_from_scaling(&s, &ScalingChoice::new(1.0, 1.0, 1).unwrap(), 16).unwrap();
        assert_eq!((slicing.m, slicing.n), (45, 45));
        assert_eq!(slicing.t, 50.0);
    }

    #[test]
    fn fractional_count_rounds_to_nearest() {
        // 720 / (16*2) = 22.5 -> 23 per the rounding rule
        let s = stats(1280, 720, 50.0);
        let slicing =
            slicing_from_scaling(&s, &ScalingChoice::new(2.0, 2.0, 2).unwrap(), 16).unwrap();
        assert_eq!((slicing.m, slicing.n), (40, 23));
        assert_eq!(slicing.t, 25.0);
        let eff = slicing.effective_d_n(&s, 16);
        assert!((eff - 720.0 / 368.0).abs() < 1e-12);
    }

    #[test]
    fn zero_slice_count_is_an_error() {
        let s = stats(32, 32, 50.0);
        let err = slicing_from_scaling(&s, &ScalingChoice::new(8.0, 8.0, 1).unwrap(), 16);
        assert!(err.is_err());
    }

    #[test]
    fn qcif_anchor() {
        let s = stats(176, 144, 15.0);
        let slicing =
            slicing_from_scaling(&s, &ScalingChoice::new(1.0, 1.0, 1).unwrap(), 16).unwrap();
        assert_eq!((slicing.m, slicing.n), (11, 9));
        let b = bits_per_slice(&BitBudget::new(1e6).unwrap(), &slicing);
        assert!((b - 673.4006734006734).abs() < 1e-9);
        let bp = bits_per_pixel(b, 16);
        assert!((bp - 2.6304713804713806).abs() < 1e-12);
    }

    #[test]
    fn unit_cases() {
        let slicing = SlicingParams { m: 4, n: 5, t: 6.0 };
        let budget = BitBudget::new(slicing.slices_per_second()).unwrap();
        assert_eq!(bits_per_slice(&budget, &slicing), 1.0);
        assert_eq!(bits_per_pixel(256.0, 16), 1.0);
    }

    #[test]
    fn more_slices_means_fewer_bits_each() {
        let budget = BitBudget::new(1e6).unwrap();
        let base = SlicingParams {
            m: 45,
            n: 45,
            t: 50.0,
        };
        let b = bits_per_slice(&budget, &base);
        for finer in [
            SlicingParams { m: 46, ..base },
            SlicingParams { n: 46, ..base },
            SlicingParams { t: 51.0, ..base },
        ] {
            assert!(bits_per_slice(&budget, &finer) < b);
        }
    }

    #[test]
    fn budget_round_trips_through_slices() {
        let slicing = SlicingParams {
            m: 45,
            n: 45,
            t: 50.0,
        };
        let budget = BitBudget::new(987654.321).unwrap();
        let b = bits_per_slice(&budget, &slicing);
        let back = b * slicing.slices_per_second();
        assert!((back / budget.bits_per_second - 1.0).abs() < 1e-12);
    }
}
