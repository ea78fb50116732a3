//! Closed-form integrals checked against adaptive quadrature of their
//! defining integrands. The integrands are transcribed here independently of
//! the library code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use stscale::spatial::{self, FramePsdParams};
use stscale::transform;
use stscale_oracle::quad;

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Eq.-style integrand of the box integral: the unit-variance separable
/// Lorentzian 2ax/(ax^2+wx^2) * 2ay/(ay^2+wy^2).
fn lorentzian(alpha_x: f64, alpha_y: f64) -> impl Fn(f64, f64) -> f64 {
    move |wx, wy| {
        (2.0 * alpha_x / (alpha_x * alpha_x + wx * wx))
            * (2.0 * alpha_y / (alpha_y * alpha_y + wy * wy))
    }
}

#[test]
fn integral_i_matches_quadrature_on_a_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2b);
    for trial in 0..50 {
        let alpha_x = log_uniform(&mut rng, 1.0, 2000.0);
        let alpha_y = log_uniform(&mut rng, 1.0, 2000.0);
        let mut xs = [rng.gen_range(0.0..5000.0), rng.gen_range(0.0..5000.0)];
        let mut ys = [rng.gen_range(0.0..5000.0), rng.gen_range(0.0..5000.0)];
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);

        let closed = spatial::integral_i(xs[0], xs[1], ys[0], ys[1], alpha_x, alpha_y);
        let quad = quad::integrate_2d_rel(
            &lorentzian(alpha_x, alpha_y),
            (xs[0], xs[1]),
            (ys[0], ys[1]),
            1e-10,
        );
        assert!(
            rel_err(closed, quad) <= 1e-8,
            "trial {trial}: closed {closed} quad {quad} (ax {alpha_x} ay {alpha_y} x {xs:?} y {ys:?})"
        );
    }
}

fn y_integrand(a: f64, k: u32, l: u32) -> impl Fn(f64, f64) -> f64 {
    move |x, xi| {
        (-a * (x - xi).abs()).exp() * (k as f64 * PI * x).cos() * (l as f64 * PI * xi).cos()
    }
}

#[test]
fn integral_y_diagonal_matches_quadrature_on_a_random_grid() {
    // the model only consumes the diagonal Y(A;k,k); sweep it over the full
    // decay range
    let mut rng = ChaCha8Rng::seed_from_u64(0x3c4d);
    for trial in 0..50 {
        let a = log_uniform(&mut rng, 0.01, 100.0);
        let k = rng.gen_range(0..=7u32);
        let closed = transform::integral_y(a, k, k);
        let quad = quad::integrate_unit_square_diag_split_rel(&y_integrand(a, k, k), 1e-11);
        assert!(
            rel_err(closed, quad) <= 1e-8,
            "trial {trial}: closed {closed} quad {quad} (a {a} k {k})"
        );
    }
}

#[test]
fn integral_y_off_diagonal_matches_quadrature() {
    // same-parity cross terms; their values at small decay fall below what
    // f64 quadrature resolves at 1e-8 relative, so the decay starts at 1
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e6f);
    for trial in 0..20 {
        let a = log_uniform(&mut rng, 1.0, 100.0);
        let k = rng.gen_range(0..=5u32);
        let l = k + 2 * rng.gen_range(1..=(7 - k) / 2).max(1);
        let closed = transform::integral_y(a, k, l);
        let quad = quad::integrate_unit_square_diag_split_rel(&y_integrand(a, k, l), 1e-11);
        assert!(
            rel_err(closed, quad) <= 1e-8,
            "trial {trial}: closed {closed} quad {quad} (a {a} k {k} l {l})"
        );
    }
}

#[test]
fn integral_y_opposite_parity_vanishes() {
    // the integrand is odd under (x, xi) -> (1-x, 1-xi); quadrature sees
    // only roundoff noise and the closed form is exactly zero
    let mut rng = ChaCha8Rng::seed_from_u64(0x90ab);
    for _ in 0..10 {
        let a = log_uniform(&mut rng, 0.01, 100.0);
        let k = rng.gen_range(0..=7u32);
        let offset = 2 * rng.gen_range(0..4u32) + 1;
        let l = (k + offset) % 8;
        if (k + l) % 2 == 0 {
            continue;
        }
        assert_eq!(transform::integral_y(a, k, l), 0.0);
        let quad = quad::integrate_unit_square_diag_split(&y_integrand(a, k, l), 1e-12);
        assert!(quad.abs() <= 1e-12, "a {a} k {k} l {l}: quad {quad}");
    }
}

#[test]
fn psd_total_power_converges_to_variance() {
    let params = FramePsdParams {
        sigma_v2: 2300.0,
        alpha_x: 36.93,
        alpha_y: 21.0,
        w0: 720.0,
        h0: 720.0,
    };
    // quadrant integral over a box much wider than both decays; the
    // integrand is the transcribed Lorentzian, not the library psd
    let cut = 1e5;
    let f = lorentzian(params.alpha_x, params.alpha_y);
    let quadrant = quad::integrate_2d_rel(
        &|wx, wy| params.sigma_v2 * f(wx, wy),
        (0.0, cut),
        (0.0, cut),
        1e-9,
    );
    assert!((spatial::psd(&params, 11.0, 7.0) - params.sigma_v2 * f(11.0, 7.0)).abs() < 1e-9);
    let total = 4.0 * quadrant / (4.0 * PI * PI);
    assert!(
        rel_err(total, params.sigma_v2) < 1e-3,
        "total {total} vs {}",
        params.sigma_v2
    );
}

#[test]
fn spatial_scaling_mse_matches_truncated_psd_quadrature() {
    // oracle decomposes the lost band differently: full box minus kept box
    let mut rng = ChaCha8Rng::seed_from_u64(0x7081);
    for trial in 0..12 {
        let rho: f64 = rng.gen_range(0.85..0.99);
        let sigma_v2 = rng.gen_range(500.0..4000.0);
        let (w0, h0) = (720.0, 720.0);
        let params = FramePsdParams {
            sigma_v2,
            alpha_x: -w0 * rho.ln(),
            alpha_y: -h0 * rho.ln(),
            w0,
            h0,
        };
        let d_m = rng.gen_range(1.05..4.0);
        let d_n = rng.gen_range(1.05..4.0);

        let closed = spatial::spatial_scaling_mse(&params, d_m, d_n);

        let lor = lorentzian(params.alpha_x, params.alpha_y);
        let f = |wx: f64, wy: f64| sigma_v2 * lor(wx, wy);
        let full = quad::integrate_2d_rel(&f, (0.0, PI * w0), (0.0, PI * h0), 1e-10);
        let kept = quad::integrate_2d_rel(&f, (0.0, PI * w0 / d_m), (0.0, PI * h0 / d_n), 1e-10);
        let quad_mse = (full - kept) / (PI * PI);

        assert!(
            rel_err(closed, quad_mse) <= 1e-7,
            "trial {trial}: closed {closed} quad {quad_mse} (rho {rho} d {d_m},{d_n})"
        );
    }
}
