//! Adaptive Gauss-Kronrod quadrature in one and two dimensions.
//!
//! Worst-panel-first refinement with a 7-15 pair. Each panel keeps an error
//! estimate and an absolute-mass estimate; refinement stops when the summed
//! error meets the tolerance, when the worst panel is at the floating-point
//! noise floor of its mass, or when the split budget runs out. Iterated 2D
//! integrals tell the outer pass how noisy the inner values are so it does
//! not chase noise.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae for the 7-15 pair (positive half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_2,
    0.063_092_092_629_978_6,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3],
/// XGK[5], center).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// A panel's error cannot drop below the roundoff of summing its mass.
const NOISE_EPS: f64 = 5e-15;

const MAX_SPLITS_1D: usize = 20_000;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    mass: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut mass = WGK[7] * fc.abs();
    for i in 0..7 {
        let dx = h * XGK[i];
        let lo = f(c - dx);
        let hi = f(c + dx);
        kronrod += WGK[i] * (lo + hi);
        mass += WGK[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
    }
    Panel {
        a,
        b,
        value: kronrod * h,
        mass: mass * h.abs(),
        err: (kronrod - gauss).abs() * h.abs(),
    }
}

/// `noise_density` is the absolute uncertainty of each integrand evaluation
/// per unit length; panels whose error estimate is inside that band are
/// final.
fn integrate_impl<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    noise_density: f64,
    max_splits: usize,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(f, a, b);
    let mut total_err = first.err;
    heap.push(first);
    let mut splits = 0usize;
    while total_err > tol && splits < max_splits {
        let worst = heap.pop().expect("heap holds at least one panel");
        let floor = NOISE_EPS * worst.mass + noise_density * (worst.b - worst.a).abs();
        if worst.err <= floor {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        splits += 1;
    }
    heap.into_iter().map(|p| p.value).sum()
}

/// Integrates `f` over `[a, b]` to roughly the given absolute tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_impl(&mut f, a, b, tol.max(1e-300), 0.0, MAX_SPLITS_1D)
}

/// Iterated 2D integral over `[x0,x1] x [y0,y1]`, absolute tolerance.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    tol: f64,
) -> f64 {
    let tol = tol.max(1e-300);
    let span = (x1 - x0).abs().max(1e-12);
    let inner_tol = tol / (8.0 * span);
    let mut outer =
        |x: f64| integrate_impl(&mut |y| f(x, y), y0, y1, inner_tol, 0.0, MAX_SPLITS_1D);
    integrate_impl(&mut outer, x0, x1, 0.5 * tol, inner_tol, 4_000)
}

/// 2D integral over the unit square for integrands with a kink along x == y
/// (the inner integral is split at the diagonal).
pub fn integrate_unit_square_diag_split<F: Fn(f64, f64) -> f64>(f: &F, tol: f64) -> f64 {
    let tol = tol.max(1e-300);
    let inner_tol = tol / 16.0;
    let mut outer = |x: f64| {
        integrate_impl(&mut |xi| f(x, xi), 0.0, x, inner_tol, 0.0, MAX_SPLITS_1D)
            + integrate_impl(&mut |xi| f(x, xi), x, 1.0, inner_tol, 0.0, MAX_SPLITS_1D)
    };
    integrate_impl(&mut outer, 0.0, 1.0, 0.5 * tol, 2.0 * inner_tol, 4_000)
}

fn to_rel<E: Fn(f64) -> f64>(eval: E, rel: f64) -> f64 {
    let mut tol = 1e-3;
    let mut value = eval(tol);
    for _ in 0..8 {
        let want = (value.abs() * rel * 0.25).max(1e-250);
        if want >= tol {
            break;
        }
        tol = want;
        value = eval(tol);
    }
    value
}

/// 2D integral refined until the absolute tolerance is small relative to the
/// current estimate.
pub fn integrate_2d_rel<F: Fn(f64, f64) -> f64>(
    f: &F,
    x: (f64, f64),
    y: (f64, f64),
    rel: f64,
) -> f64 {
    to_rel(|tol| integrate_2d(f, x, y, tol), rel)
}

/// Diagonal-split unit-square integral refined to a relative target.
pub fn integrate_unit_square_diag_split_rel<F: Fn(f64, f64) -> f64>(f: &F, rel: f64) -> f64 {
    to_rel(|tol| integrate_unit_square_diag_split(f, tol), rel)
}
