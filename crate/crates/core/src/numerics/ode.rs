//! Explicit Dormand-Prince 4(5) integration.
//!
//! Adaptive step control with the embedded fourth-order error estimate and
//! the first-same-as-last evaluation reuse. State vectors are fixed-size
//! arrays so oscillator problems (real or complexified) avoid allocation in
//! the inner loop. Integration direction follows the sign of `t1 - t0`.

use crate::{Error, Result};

/// Tolerances and step limits for the integrator.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Upper bound on |step|; caps sampling density for oscillatory
    /// coefficients.
    pub max_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
        }
    }
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
/// Fifth-order solution weights; also the last stage row (FSAL).
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded fourth-order weights.
const BS: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy<const D: usize>(y: &[f64; D], coeffs: &[f64], ks: &[[f64; D]], h: f64) -> [f64; D] {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks.iter()) {
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One trial step from `(t, y)` with step `h`.
///
/// Returns the fifth-order update, the scaled error norm, and the final
/// stage derivative for FSAL reuse. `k1` must equal `f(t, y)`.
fn trial_step<const D: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; D],
    h: f64,
    k1: &[f64; D],
    opts: &OdeOptions,
) -> ([f64; D], f64, [f64; D])
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let k2 = f(t + C[0] * h, &axpy(y, &A2, &[*k1], h));
    let k3 = f(t + C[1] * h, &axpy(y, &A3, &[*k1, k2], h));
    let k4 = f(t + C[2] * h, &axpy(y, &A4, &[*k1, k2, k3], h));
    let k5 = f(t + C[3] * h, &axpy(y, &A5, &[*k1, k2, k3, k4], h));
    let k6 = f(t + C[4] * h, &axpy(y, &A6, &[*k1, k2, k3, k4, k5], h));
    let ks6 = [*k1, k2, k3, k4, k5, k6];
    let y5 = axpy(y, &B[..6], &ks6, h);
    let k7 = f(t + h, &y5);

    let ks = [*k1, k2, k3, k4, k5, k6, k7];
    let mut err_sq = 0.0;
    for i in 0..D {
        let mut e = 0.0;
        for (j, k) in ks.iter().enumerate() {
            e += (B[j] - BS[j]) * k[i];
        }
        e *= h;
        let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
        let r = e / scale;
        err_sq += r * r;
    }
    (y5, (err_sq / D as f64).sqrt(), k7)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`, returning the final state.
///
/// # Errors
///
/// [`Error::StepUnderflow`] if step control collapses the step to the
/// floating-point resolution of `t` (singular or non-finite right-hand
/// side).
pub fn integrate<const D: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; D],
    opts: &OdeOptions,
) -> Result<[f64; D]>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let mut sink = |_: f64, _: &[f64; D]| {};
    integrate_observed(f, t0, t1, y0, opts, &mut sink)
}

/// [`integrate`] with an observer called at every accepted step `(t, y)`,
/// including the initial state.
pub fn integrate_observed<const D: usize, F, O>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; D],
    opts: &OdeOptions,
    observe: &mut O,
) -> Result<[f64; D]>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    O: FnMut(f64, &[f64; D]),
{
    if t0 == t1 {
        observe(t0, &y0);
        return Ok(y0);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    observe(t, &y);
    let mut h = dir * (span / 100.0).min(opts.max_step);

    loop {
        let remaining = t1 - t;
        if remaining * dir <= 0.0 {
            break;
        }
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        let (y5, err, k7) = trial_step(&f, t, &y, h, &k1, opts);
        if err.is_finite() && err <= 1.0 {
            t += h;
            y = y5;
            k1 = k7;
            observe(t, &y);
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = dir * (h.abs() * grow).min(opts.max_step);
        } else {
            let shrink = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= shrink;
        }
        if h.abs() < 4.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
    }
    Ok(y)
}

/// Integrates along `grid`, returning the state at every grid point.
///
/// The grid must be strictly monotone (either direction); steps are clamped
/// to land exactly on each grid time so no interpolation is involved.
///
/// # Errors
///
/// [`Error::StepUnderflow`] as for [`integrate`]; also if `grid` has fewer
/// than two points or is not strictly monotone.
pub fn integrate_path<const D: usize, F>(
    f: F,
    grid: &[f64],
    y0: [f64; D],
    opts: &OdeOptions,
) -> Result<Vec<[f64; D]>>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    if grid.len() < 2 {
        return Err(Error::StepUnderflow {
            t: grid.first().copied().unwrap_or(f64::NAN),
            h: 0.0,
        });
    }
    let dir = (grid[1] - grid[0]).signum();
    if dir == 0.0 || grid.windows(2).any(|w| (w[1] - w[0]) * dir <= 0.0) {
        return Err(Error::StepUnderflow { t: grid[0], h: 0.0 });
    }

    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    let mut y = y0;
    for w in grid.windows(2) {
        y = integrate(&f, w[0], w[1], y, opts)?;
        out.push(y);
    }
    Ok(out)
}
