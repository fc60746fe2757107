//! Quadrature rules.
//!
//! Adaptive Gauss-Kronrod 15(7) integration for smooth real integrands with
//! localised structure, composite Simpson rules (plain and cumulative)
//! generic over the value type, and Gauss-Hermite nodes and weights for
//! integrals against exp(-x^2).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Kronrod nodes on [-1, 1]; odd indices are the embedded 7-point Gauss rule.
const XGK: [f64; 15] = [
    -0.991_455_371_120_812_6,
    -0.949_107_912_342_758_5,
    -0.864_864_423_359_769_1,
    -0.741_531_185_599_394_4,
    -0.586_087_235_467_691_1,
    -0.405_845_151_377_397_2,
    -0.207_784_955_007_898_5,
    0.0,
    0.207_784_955_007_898_5,
    0.405_845_151_377_397_2,
    0.586_087_235_467_691_1,
    0.741_531_185_599_394_4,
    0.864_864_423_359_769_1,
    0.949_107_912_342_758_5,
    0.991_455_371_120_812_6,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 15] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
    0.204_432_940_075_298_89,
    0.190_350_578_064_785_4,
    0.169_004_726_639_267_9,
    0.140_653_259_715_525_92,
    0.104_790_010_322_250_18,
    0.063_092_092_629_978_56,
    0.022_935_322_010_529_224,
];

/// Gauss weights for the embedded rule at the odd Kronrod nodes.
const WG: [f64; 7] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_64,
    0.129_484_966_168_869_7,
];

/// Subdivision budget for [`adaptive_gk`].
const MAX_INTERVALS: usize = 4000;

/// One Gauss-Kronrod 15(7) evaluation over `[a, b]`.
///
/// Returns the Kronrod estimate and the |Kronrod - Gauss| error signal.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let fx = f(center + half * x);
        kronrod += wk * fx;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fx;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half.abs())
}

#[derive(Debug)]
struct Interval {
    a: f64,
    b: f64,
    estimate: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]` by adaptive Gauss-Kronrod subdivision.
///
/// Splits the interval with the largest error signal until the summed error
/// satisfies `max(abs_tol, rel_tol * |integral|)`.
///
/// # Errors
///
/// [`Error::QuadratureNotConverged`] when the subdivision budget is spent
/// before the tolerance is met (non-integrable or unresolved integrand).
pub fn adaptive_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    let (estimate, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval {
        a,
        b,
        estimate,
        error,
    });
    let mut total_estimate = estimate;
    let mut total_error = error;

    loop {
        // NaN error falls through to the non-convergence branch.
        if total_error <= abs_tol.max(rel_tol * total_estimate.abs()) {
            return Ok(total_estimate);
        }
        if heap.len() >= MAX_INTERVALS
            || !total_estimate.is_finite()
            || !total_error.is_finite()
        {
            return Err(Error::QuadratureNotConverged {
                estimate: total_estimate,
                error_bound: total_error,
            });
        }
        let worst = heap.pop().expect("heap non-empty while error above tolerance");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; cannot split further.
            return Err(Error::QuadratureNotConverged {
                estimate: total_estimate,
                error_bound: total_error,
            });
        }
        let (left_est, left_err) = gk15(&f, worst.a, mid);
        let (right_est, right_err) = gk15(&f, mid, worst.b);
        total_estimate += left_est + right_est - worst.estimate;
        total_error += left_err + right_err - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            estimate: left_est,
            error: left_err,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            estimate: right_est,
            error: right_err,
        });
    }
}

/// Value types Simpson rules can accumulate: f64, complex amplitudes.
pub trait SimpsonValue:
    Copy + Default + std::ops::Add<Output = Self> + std::ops::Mul<f64, Output = Self>
{
}
impl<T> SimpsonValue for T where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>
{
}

/// Composite Simpson integral of uniformly spaced samples with step `h`.
///
/// With an even sample count the final interval uses the three-point
/// half-panel rule, so accuracy is preserved at O(h^4) globally.
/// Fewer than two samples integrate to zero.
pub fn simpson<T: SimpsonValue>(values: &[T], h: f64) -> T {
    let n = values.len();
    if n < 2 {
        return T::default();
    }
    if n == 2 {
        return (values[0] + values[1]) * (0.5 * h);
    }
    let mut acc = T::default();
    let pairs = (n - 1) / 2;
    for j in 0..pairs {
        let i = 2 * j;
        acc = acc + (values[i] + values[i + 1] * 4.0 + values[i + 2]) * (h / 3.0);
    }
    if (n - 1) % 2 == 1 {
        // Half panel over the last interval from the final three samples.
        acc = acc
            + (values[n - 3] * (-1.0) + values[n - 2] * 8.0 + values[n - 1] * 5.0) * (h / 12.0);
    }
    acc
}

/// Cumulative Simpson integral: returns `C` with `C[i] = integral up to i`.
///
/// Even indices accumulate full Simpson panels; odd indices add the
/// ascending half-panel through the next sample (or through the previous two
/// at the final sample). `C[0] = 0`. Panics if fewer than three samples.
pub fn cumulative_simpson<T: SimpsonValue>(values: &[T], h: f64) -> Vec<T> {
    let n = values.len();
    assert!(n >= 3, "cumulative Simpson needs at least three samples");
    let mut c = vec![T::default(); n];
    let mut even_acc = T::default();
    for j in 0..(n - 1) / 2 {
        let i = 2 * j;
        c[i + 1] = even_acc
            + (values[i] * 5.0 + values[i + 1] * 8.0 + values[i + 2] * (-1.0)) * (h / 12.0);
        even_acc = even_acc + (values[i] + values[i + 1] * 4.0 + values[i + 2]) * (h / 3.0);
        c[i + 2] = even_acc;
    }
    if n.is_multiple_of(2) {
        c[n - 1] = c[n - 2]
            + (values[n - 3] * (-1.0) + values[n - 2] * 8.0 + values[n - 1] * 5.0) * (h / 12.0);
    }
    c
}

/// Gauss-Hermite nodes and weights for integrals of f(x) exp(-x^2).
///
/// Built from the orthonormal three-term recurrence with interlacing
/// bisection brackets and a Newton polish; weights are Christoffel numbers
/// 1 / sum_k p_k(x_i)^2. Stable through n = 64.
///
/// # Errors
///
/// [`Error::OrderTooLarge`] for n = 0 or n > 64.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    const MAX_N: usize = 64;
    if n == 0 || n > MAX_N {
        return Err(Error::OrderTooLarge { order: n, max: MAX_N });
    }

    // Orthonormal values p_0..p_m at x; returns (p_m, p_{m-1}).
    let eval = |m: usize, x: f64| -> (f64, f64) {
        let mut p_prev = 0.0;
        let mut p = std::f64::consts::PI.powf(-0.25);
        for k in 0..m {
            let kf = k as f64;
            let next = x * (2.0 / (kf + 1.0)).sqrt() * p - (kf / (kf + 1.0)).sqrt() * p_prev;
            p_prev = p;
            p = next;
        }
        (p, p_prev)
    };

    // Grow the root set degree by degree; roots of p_{m+1} interlace those
    // of p_m, with outer brackets at +-sqrt(2m + 3) + 1.
    let mut roots: Vec<f64> = vec![0.0];
    for m in 1..n {
        let bound = (2.0 * (m as f64) + 3.0).sqrt() + 1.0;
        let mut edges = Vec::with_capacity(m + 2);
        edges.push(-bound);
        edges.extend_from_slice(&roots);
        edges.push(bound);
        let mut next = Vec::with_capacity(m + 1);
        for w in edges.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let mut flo = eval(m + 1, lo).0;
            for _ in 0..120 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= 1e-14 * mid.abs().max(1e-3) {
                    break;
                }
                let fm = eval(m + 1, mid).0;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let mut x = 0.5 * (lo + hi);
            // Newton polish with p' = sqrt(2m) p_{m-1} for orthonormal p_m.
            for _ in 0..4 {
                let (pm, pm_minus) = eval(m + 1, x);
                let deriv = (2.0 * (m as f64 + 1.0)).sqrt() * pm_minus;
                if deriv == 0.0 {
                    break;
                }
                let step = pm / deriv;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1e-3) {
                    break;
                }
            }
            next.push(x);
        }
        roots = next;
    }

    let weights = roots
        .iter()
        .map(|&x| {
            let mut p_prev = 0.0;
            let mut p = std::f64::consts::PI.powf(-0.25);
            let mut sum_sq = p * p;
            for k in 0..n - 1 {
                let kf = k as f64;
                let next = x * (2.0 / (kf + 1.0)).sqrt() * p - (kf / (kf + 1.0)).sqrt() * p_prev;
                p_prev = p;
                p = next;
                sum_sq += p * p;
            }
            1.0 / sum_sq
        })
        .collect();
    Ok((roots, weights))
}
