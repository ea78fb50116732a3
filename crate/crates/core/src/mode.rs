//! Inter/skip coding-mode probabilities as a function of bits per slice.
//!
//! The inter-mode share follows a linear-fractional curve in the slice
//! bit-rate; its asymptote and convergence rate depend on the frame rate and
//! the motion complexity of the video. Intra coding is neglected at low
//! bit-rates, so p_inter + p_skip = 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    /// Minimal asymptotic inter-mode share, on the 0-100 percentage scale.
    pub p_inter_asymp_min: f64,
    /// Normalization of the motion term in the asymptote.
    pub gamma_c: f64,
    /// Base convergence rate, in bits per slice.
    pub gamma_d: f64,
}

impl Default for ModeParams {
    fn default() -> Self {
        ModeParams {
            p_inter_asymp_min: 85.0,
            gamma_c: 0.3,
            gamma_d: 20.0,
        }
    }
}

impl ModeParams {
    pub fn validate(&self) -> Result<()> {
        if self.p_inter_asymp_min.is_nan()
            || self.p_inter_asymp_min <= 0.0
            || self.p_inter_asymp_min > 100.0
        {
            return Err(Error::validation(format!(
                "p_inter_asymp_min must lie in (0, 100], got {}",
                self.p_inter_asymp_min
            )));
        }
        if self.gamma_c.is_nan()
            || self.gamma_d.is_nan()
            || self.gamma_c < 0.0
            || self.gamma_d < 0.0
        {
            return Err(Error::validation("gamma_c and gamma_d must be nonnegative"));
        }
        Ok(())
    }
}

/// Coefficients of the linear-fractional mode curve at one frame rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    /// Controls the asymptote: p_inter -> 1/c_m as the rate grows.
    pub c_m: f64,
    /// Controls the convergence rate, in bits per slice.
    pub d_m: f64,
}

/// c_m = 100 / (P_min + gamma_c * qvar / f_rate), d_m = gamma_d + qvar / f_rate.
pub fn mode_coefficients(params: &ModeParams, qvar: f64, f_rate: f64) -> Result<ModeCoefficients> {
    params.validate()?;
    if f_rate <= 0.0 || !f_rate.is_finite() {
        return Err(Error::validation("frame rate must be positive"));
    }
    if qvar.is_nan() || qvar < 0.0 {
        return Err(Error::validation("qvar must be nonnegative"));
    }
    let motion = qvar / f_rate;
    Ok(ModeCoefficients {
        c_m: 100.0 / (params.p_inter_asymp_min + params.gamma_c * motion),
        d_m: params.gamma_d + motion,
    })
}

/// Inter-mode probability at the given slice bit-rate, clamped to [0, 1].
pub fn p_inter(b_slice: f64, coeff: &ModeCoefficients) -> f64 {
    let denom = coeff.c_m * b_slice + coeff.d_m;
    if denom.is_nan() || denom <= 0.0 {
        return if b_slice > 0.0 { 1.0 } else { 0.0 };
    }
    (b_slice / denom).clamp(0.0, 1.0)
}

pub fn p_skip(b_slice: f64, coeff: &ModeCoefficients) -> f64 {
    1.0 - p_inter(b_slice, coeff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_motion_collapses_to_base_constants() {
        let c = mode_coefficients(&ModeParams::default(), 0.0, 50.0).unwrap();
        assert!((c.c_m - 100.0 / 85.0).abs() < 1e-12);
        assert_eq!(c.d_m, 20.0);
    }

    #[test]
    fn reference_parameters() {
        // P = 85, gamma_c = 0.3, gamma_d = 20, qvar = 225, f = 50
        let c = mode_coefficients(&ModeParams::default(), 225.0, 50.0).unwrap();
        assert!((c.c_m - 1.1580775911986103).abs() < 1e-12, "c_m {}", c.c_m);
        assert_eq!(c.d_m, 24.5);
        assert!((1.0 / c.c_m - 0.8635).abs() < 1e-12);
    }

    #[test]
    fn more_motion_lowers_asymptote_and_slows_convergence() {
        let lo = mode_coefficients(&ModeParams::default(), 225.0, 50.0).unwrap();
        let hi = mode_coefficients(&ModeParams::default(), 800.0, 50.0).unwrap();
        assert!(hi.c_m < lo.c_m);
        assert!(hi.d_m > lo.d_m);
    }

    #[test]
    fn zero_rate_is_all_skip() {
        let c = mode_coefficients(&ModeParams::default(), 225.0, 50.0).unwrap();
        assert_eq!(p_inter(0.0, &c), 0.0);
        assert_eq!(p_skip(0.0, &c), 1.0);
    }

    #[test]
    fn midpoint_value() {
        // at b = d_m / c_m the curve reaches half its asymptote
        let c = mode_coefficients(&ModeParams::default(), 225.0, 50.0).unwrap();
        let p = p_inter(c.d_m / c.c_m, &c);
        assert!((p - 0.5 / c.c_m).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let c = mode_coefficients(&ModeParams::default(), 500.0, 25.0).unwrap();
        for b in [0.0, 0.5, 3.0, 700.0, 1e9] {
            let sum = p_inter(b, &c) + p_skip(b, &c);
            assert!((sum - 1.0).abs() < 1e-15);
        }
    }
}
