//! Bracketed scalar root finding.
//!
//! Bisection narrows the bracket to the requested relative width, then a few
//! secant steps polish the estimate without leaving the bracket. Bisection
//! alone guarantees convergence on any sign change; the polish recovers fast
//! local convergence near simple roots.

use std::fmt;

/// Failure modes of bracketed root finding.
#[derive(Debug, Clone, PartialEq)]
pub enum RootError {
    /// `f(lo)` and `f(hi)` have the same sign.
    NoSignChange {
        /// Lower bracket edge.
        lo: f64,
        /// Upper bracket edge.
        hi: f64,
    },
    /// Bracket edges are not ordered or not finite.
    BadBracket {
        /// Lower bracket edge.
        lo: f64,
        /// Upper bracket edge.
        hi: f64,
    },
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootError::NoSignChange { lo, hi } => {
                write!(f, "no sign change over [{lo}, {hi}]")
            }
            RootError::BadBracket { lo, hi } => {
                write!(f, "bad bracket [{lo}, {hi}]")
            }
        }
    }
}

impl std::error::Error for RootError {}

const MAX_BISECTIONS: usize = 200;
const SECANT_POLISH_STEPS: usize = 4;

/// Finds a root of `f` inside `[lo, hi]`.
///
/// The bracket must contain a sign change. `rel_tol` bounds the final
/// bracket width relative to the midpoint magnitude (with an absolute floor
/// of `f64::MIN_POSITIVE.sqrt()` near zero). Exact zeros at the bracket
/// edges are returned immediately.
///
/// # Errors
///
/// [`RootError::BadBracket`] if the edges are unordered or non-finite,
/// [`RootError::NoSignChange`] if `f` has the same sign at both edges.
pub fn bracketed_root<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(RootError::BadBracket { lo, hi });
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        let width_goal = rel_tol * mid.abs().max(f64::MIN_POSITIVE.sqrt());
        if b - a <= width_goal {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }

    // Secant polish, clamped to the final bracket. Function values at the
    // converged bracket can be tiny; bail out as soon as a step degenerates.
    let mut x0 = a;
    let mut x1 = b;
    let mut f0 = fa;
    let mut f1 = fb;
    let (mut best, mut best_f) = if f0.abs() <= f1.abs() {
        (x0, f0)
    } else {
        (x1, f1)
    };
    for _ in 0..SECANT_POLISH_STEPS {
        let denom = f1 - f0;
        if denom == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        if !x2.is_finite() || x2 < a || x2 > b {
            break;
        }
        let f2 = f(x2);
        if f2 == 0.0 {
            return Ok(x2);
        }
        if f2.abs() < best_f.abs() {
            best = x2;
            best_f = f2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    Ok(best)
}
