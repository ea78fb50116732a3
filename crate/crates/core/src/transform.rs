//! Transform coding of the prediction residual: coefficient second moments,
//! relative bit allocation, and the expected quantized slice MSE.
//!
//! Each 16x16 prediction block is transform-coded as beta^2 sub-blocks with a
//! separable cosine basis. Coefficient energies follow from the residual's
//! Markov autocorrelation through the kernel integral Y; a weighted-quantizer
//! matrix splits the per-slice coefficient budget.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slicing::SlicingParams;

/// Transform-stage configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    /// Prediction-to-transform dimension ratio (4 for 4x4 transforms in
    /// 16x16 blocks).
    pub beta: u32,
    /// Transform block dimension.
    pub d_trans: u32,
    /// Normalized quantization weights, row-major d_trans x d_trans; they
    /// sum to 1.
    q_weight_norm: Vec<f64>,
    /// Retained coefficient indices, zero-based.
    pub omega: Vec<(u32, u32)>,
}

impl TransformConfig {
    /// Builds a configuration, normalizing the weight matrix. `omega = None`
    /// retains the full matrix.
    pub fn new(
        beta: u32,
        d_trans: u32,
        q_weight: &[f64],
        omega: Option<Vec<(u32, u32)>>,
    ) -> Result<Self> {
        if beta == 0 || d_trans == 0 {
            return Err(Error::validation("beta and d_trans must be positive"));
        }
        let q_weight_norm = normalize_qweight(q_weight, d_trans)?;
        let omega = match omega {
            Some(mut set) => {
                if set.is_empty() {
                    return Err(Error::validation("omega must not be empty"));
                }
                for &(k, l) in &set {
                    if k >= d_trans || l >= d_trans {
                        return Err(Error::validation(format!(
                            "omega index ({k},{l}) outside {d_trans}x{d_trans} transform"
                        )));
                    }
                }
                set.sort_unstable();
                set.dedup();
                set
            }
            None => (0..d_trans)
                .flat_map(|k| (0..d_trans).map(move |l| (k, l)))
                .collect(),
        };
        Ok(TransformConfig {
            beta,
            d_trans,
            q_weight_norm,
            omega,
        })
    }

    /// 4x4 uniform-quantizer transform inside 16x16 prediction blocks.
    pub fn h264_baseline() -> Self {
        TransformConfig::new(4, 4, &[1.0; 16], None).expect("static configuration is valid")
    }

    pub fn q_weight_norm(&self, k: u32, l: u32) -> f64 {
        self.q_weight_norm[(k * self.d_trans + l) as usize]
    }
}

/// Normalized weighted-quantization matrix: entry (k,l) is the inverse weight
/// divided by the sum of all inverse weights, so the entries sum to 1.
pub fn normalize_qweight(q_weight: &[f64], d_trans: u32) -> Result<Vec<f64>> {
    let expected = (d_trans * d_trans) as usize;
    if q_weight.len() != expected {
        return Err(Error::validation(format!(
            "q_weight needs {expected} entries for a {d_trans}x{d_trans} transform, got {}",
            q_weight.len()
        )));
    }
    for &w in q_weight {
        if w <= 0.0 || !w.is_finite() {
            return Err(Error::validation(format!(
                "q_weight entries must be positive, got {w}"
            )));
        }
    }
    let inv_sum: f64 = q_weight.iter().map(|w| 1.0 / w).sum();
    Ok(q_weight.iter().map(|w| 1.0 / w / inv_sum).collect())
}

/// Kernel integral of the exponential autocorrelation against the cosine
/// basis:
///
/// Y(A;k,l) = int_0^1 int_0^1 e^{-A|x-xi|} cos(k pi x) cos(l pi xi) dx dxi
///
/// Closed form: the first term exists only on the diagonal k == l (doubled
/// when the index is 0); the second term is
///
///   -A^2 / ((A^2+(l pi)^2)(A^2+(k pi)^2))
///     * ((1 + (-1)^{k+l}) - e^{-A} [(-1)^k + (-1)^l])
///
/// For indices of opposite parity the integrand is odd under
/// (x, xi) -> (1-x, 1-xi), so the integral vanishes identically; the bracket
/// above is zero there, which quadrature confirms.
pub fn integral_y(a: f64, k: u32, l: u32) -> f64 {
    debug_assert!(a > 0.0, "integral_y needs a positive decay, got {a}");
    // small-a diagonal DC case has a catastrophic cancellation; use the series
    if k == 0 && l == 0 && a < 1e-3 {
        return 1.0 - a / 3.0 + a * a / 12.0 - a * a * a / 60.0;
    }
    let kpi = k as f64 * PI;
    let lpi = l as f64 * PI;
    let dk = a * a + kpi * kpi;
    let dl = a * a + lpi * lpi;

    let mut y = 0.0;
    if k == l {
        let delta_kor = if k == 0 { 1.0 } else { 0.0 };
        y += (a / dl + a / dk) * 0.5 * (1.0 + delta_kor);
    }
    let bracket = match (k % 2, l % 2) {
        (0, 0) => -2.0 * f64::exp_m1(-a), // 2 - 2 e^{-a}, cancellation-free
        (1, 1) => 2.0 + 2.0 * (-a).exp(),
        _ => 0.0,
    };
    y -= a * a / (dl * dk) * bracket;
    y
}

/// Second moment of transform coefficient (k,l) of the residual over a
/// sub-slice:
///
/// E[F_kl^2] = sigma_fr2 (2-delta_k)(2-delta_l) / (beta^2 M N)
///             * Y(alpha_x/(beta M); k, k) * Y(alpha_y/(beta N); l, l)
#[allow(clippy::too_many_arguments)]
pub fn coeff_second_moment(
    sigma_fr2: f64,
    alpha_rx: f64,
    alpha_ry: f64,
    cfg: &TransformConfig,
    m: u32,
    n: u32,
    k: u32,
    l: u32,
) -> f64 {
    let bm = cfg.beta as f64 * m as f64;
    let bn = cfg.beta as f64 * n as f64;
    let wk = if k == 0 { 1.0 } else { 2.0 };
    let wl = if l == 0 { 1.0 } else { 2.0 };
    sigma_fr2 * wk * wl / (bm * bn)
        * integral_y(alpha_rx / bm, k, k)
        * integral_y(alpha_ry / bn, l, l)
}

/// Per-coefficient bit budget of one sub-slice, plus the intermediate
/// slice-level budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct BitAllocation {
    /// Bits for the coefficients of one inter-coded slice:
    /// B_total / (M N T p_inter).
    pub b_coeffs_slice: f64,
    /// Per sub-slice: the above divided by beta^2.
    pub b_coeffs_sub_slice: f64,
    /// Bits per retained coefficient, aligned with `cfg.omega`.
    pub bits: Vec<f64>,
}

/// Splits the total budget among transform coefficients of inter slices:
/// b_kl = Qnorm(k,l) * B_total / (beta^2 M N T p_inter).
pub fn allocate_bits(
    bits_per_second: f64,
    slicing: &SlicingParams,
    p_inter: f64,
    cfg: &TransformConfig,
) -> Result<BitAllocation> {
    if p_inter.is_nan() || p_inter <= 0.0 {
        return Err(Error::NoInterSlices);
    }
    let b_coeffs_slice = bits_per_second / (slicing.slices_per_second() * p_inter);
    let beta2 = (cfg.beta * cfg.beta) as f64;
    let b_coeffs_sub_slice = b_coeffs_slice / beta2;
    let bits = cfg
        .omega
        .iter()
        .map(|&(k, l)| cfg.q_weight_norm(k, l) * b_coeffs_sub_slice)
        .collect();
    Ok(BitAllocation {
        b_coeffs_slice,
        b_coeffs_sub_slice,
        bits,
    })
}

/// Expected quantized slice MSE for inter coding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterMse {
    pub value: f64,
    /// Raw value of the formula before the nonnegativity clamp.
    pub raw: f64,
    /// Set when the raw value was negative and clamped to 0.
    pub clamped_low: bool,
}

/// E[MSE^Q] = sigma_fr2 - beta^2 M N * sum_{(k,l) in omega}
///            var{F_kl} (1 - K 2^{-2 b_kl}),
/// clamped below at 0.
///
/// With K > 1 and very small b_kl the per-coefficient factor goes negative,
/// i.e. quantizing that coefficient costs more than dropping it; the formula
/// is kept as is and only the final value is clamped.
pub fn inter_mse(
    sigma_fr2: f64,
    alpha_rx: f64,
    alpha_ry: f64,
    cfg: &TransformConfig,
    slicing: &SlicingParams,
    alloc: &BitAllocation,
    k_quant: f64,
) -> Result<InterMse> {
    if !(1.0..=3.0).contains(&k_quant) {
        return Err(Error::validation(format!(
            "k_quant must lie in [1, 3], got {k_quant}"
        )));
    }
    if alloc.bits.len() != cfg.omega.len() {
        return Err(Error::validation(
            "bit allocation does not match the retained coefficient set",
        ));
    }
    let beta2_mn = (cfg.beta * cfg.beta) as f64 * slicing.m as f64 * slicing.n as f64;
    let mut retained = 0.0;
    for (&(k, l), &b) in cfg.omega.iter().zip(&alloc.bits) {
        if b.is_nan() || b < 0.0 {
            return Err(Error::validation("coefficient bit budgets must be >= 0"));
        }
        let var = coeff_second_moment(
            sigma_fr2, alpha_rx, alpha_ry, cfg, slicing.m, slicing.n, k, l,
        );
        retained += var * (1.0 - k_quant / (2.0 * b).exp2());
    }
    let raw = sigma_fr2 - beta2_mn * retained;
    Ok(InterMse {
        value: raw.max(0.0),
        raw,
        clamped_low: raw < 0.0,
    })
}
