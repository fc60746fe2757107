//! Time-domain oracles for the driven mode propagator.
//!
//! Both routes solve the boundary-value problem
//! [d_t^2 + W(t)] Delta(t, t') = -delta(t - t') on a window [t_i, t_f] with
//! Delta vanishing at both ends, where W(t) = Omega^2 (1 + f(t)) is the
//! full squared resonance frequency including the drive.
//!
//! [`exact_green_oracle`] builds Delta from two homogeneous solutions
//! integrated as ODEs,
//!
//! Delta(t, t') = -u1(t_<) u2(t_>) / W_r,  W_r = u1 u2' - u2 u1',
//!
//! with u1 vanishing at t_i and u2 at t_f. Each solution is integrated in
//! defect form, u = u_ref + w with u_ref an exact solution of the constant
//! reference oscillator Omega_ref^2 = mean W, so the integration error
//! scales with the drive, not with the carrier. For constant W this
//! reproduces sin(Omega (t_< - t_i)) sin(Omega (t_f - t_>)) /
//! (Omega sin(Omega T)) to machine precision.
//!
//! [`born_series`] expands the same propagator around a constant reference
//! in powers of V = W - Omega0^2,
//!
//! Delta^(n)(t, t') = int Delta^(0)(t, s) V(s) Delta^(n-1)(s, t') ds,
//!
//! assembled in O(N) per order from cumulative Simpson sums. Comparing the
//! two routes isolates each perturbative order and pins the residual
//! Delta - Delta^(0) - Delta^(1) - Delta^(2) to cubic drive scaling.

use crate::numerics::ode::{integrate_path, OdeOptions};
use crate::numerics::quad::cumulative_simpson;
use crate::{Error, Result};

/// Wronskians below RELATIVE_CAUSTIC_TOL times the solution scale are
/// treated as caustic (window length at a half-period of the reference).
const RELATIVE_CAUSTIC_TOL: f64 = 1e-9;

fn uniform_grid(t_i: f64, t_f: f64, n: usize) -> (Vec<f64>, f64) {
    let h = (t_f - t_i) / (n - 1) as f64;
    ((0..n).map(|j| t_i + j as f64 * h).collect(), h)
}

fn snapped_node(t_i: f64, t_f: f64, h: f64, n: usize, t_prime: f64) -> Result<usize> {
    if !(t_i..=t_f).contains(&t_prime) {
        return Err(Error::config(format!(
            "t_prime = {t_prime} outside the window [{t_i}, {t_f}]"
        )));
    }
    Ok((((t_prime - t_i) / h).round() as usize).min(n - 1))
}

/// Cubic Lagrange interpolation of uniform samples, clamped to one-sided
/// stencils at the window ends.
fn cubic_sample(ys: &[f64], t0: f64, h: f64, t: f64) -> f64 {
    let x = (t - t0) / h;
    let i0 = (x.floor() as isize - 1).clamp(0, ys.len() as isize - 4) as usize;
    let u = x - i0 as f64;
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    ys[i0] * l0 + ys[i0 + 1] * l1 + ys[i0 + 2] * l2 + ys[i0 + 3] * l3
}

/// Homogeneous solution in defect form: y = ref + w, with ref an exact
/// reference-oscillator solution sharing the initial data, so only the
/// drive-induced defect w is integrated numerically.
fn defect_solution<W, R>(pot: &W, reference: R, omega_ref_sq: f64, grid: &[f64]) -> Result<Vec<f64>>
where
    W: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-16,
        ..OdeOptions::default()
    };
    let states = integrate_path(
        |t: f64, y: &[f64; 2]| {
            let w_t = pot(t);
            [y[1], -w_t * y[0] - (w_t - omega_ref_sq) * reference(t)]
        },
        grid,
        [0.0, 0.0],
        &opts,
    )?;
    Ok(grid
        .iter()
        .zip(&states)
        .map(|(&t, y)| reference(t) + y[0])
        .collect())
}

fn green_samples<W: Fn(f64) -> f64>(pot: &W, grid: &[f64], jp: usize) -> Result<Vec<f64>> {
    let n = grid.len();
    let t_i = grid[0];
    let mean: f64 = grid.iter().map(|&t| pot(t)).sum::<f64>() / n as f64;
    let omega_ref_sq = if mean > 0.0 { mean } else { 1.0 };
    let omega_ref = omega_ref_sq.sqrt();

    // u1(t_i) = 0, u1'(t_i) = 1 and the cosine partner s1(t_i) = 1,
    // s1'(t_i) = 0; u2 = s1 u1(t_f) - u1 s1(t_f) then vanishes at t_f with
    // u2'(t_f) = -1, and W_r = -u2(t_i) = -u1(t_f).
    let u1 = defect_solution(pot, |t: f64| (omega_ref * (t - t_i)).sin() / omega_ref, omega_ref_sq, grid)?;
    let s1 = defect_solution(pot, |t: f64| (omega_ref * (t - t_i)).cos(), omega_ref_sq, grid)?;
    let u1_end = u1[n - 1];
    let s1_end = s1[n - 1];
    let u2: Vec<f64> = u1
        .iter()
        .zip(&s1)
        .map(|(&a, &b)| b * u1_end - a * s1_end)
        .collect();

    let wronskian = -u1_end;
    let scale = u1.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
        * u2.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if wronskian.abs() < RELATIVE_CAUSTIC_TOL * (1.0 + scale) {
        return Err(Error::WronskianSingular { wronskian });
    }

    Ok((0..n)
        .map(|j| {
            if j <= jp {
                -u1[j] * u2[jp] / wronskian
            } else {
                -u1[jp] * u2[j] / wronskian
            }
        })
        .collect())
}

/// Exact driven propagator Delta(t, t') on the uniform grid carrying the
/// squared-frequency samples `omega_sq` over [t_i, t_f]; t_prime is snapped
/// to the nearest grid node. Between nodes the frequency is interpolated by
/// a cubic.
///
/// # Errors
///
/// [`Error::Config`] on fewer than four samples, a non-ascending window or
/// t_prime outside it; [`Error::WronskianSingular`] when the window sits at
/// a caustic of the driven oscillator; integration errors from the
/// homogeneous solves.
pub fn exact_green_oracle(
    omega_sq: &[f64],
    t_i: f64,
    t_f: f64,
    t_prime: f64,
) -> Result<Vec<f64>> {
    let n = omega_sq.len();
    if n < 4 {
        return Err(Error::config("exact propagator needs at least four frequency samples"));
    }
    if !(t_i.is_finite() && t_f.is_finite()) || t_f <= t_i {
        return Err(Error::config("window must satisfy t_f > t_i"));
    }
    let (grid, h) = uniform_grid(t_i, t_f, n);
    let jp = snapped_node(t_i, t_f, h, n, t_prime)?;
    let pot = |t: f64| cubic_sample(omega_sq, t_i, h, t);
    green_samples(&pot, &grid, jp)
}

/// First three Born orders [Delta0, Delta1, Delta2] of the propagator around
/// the constant reference `omega0`, for the drive samples
/// v(t) = W(t) - omega0^2 on the uniform grid over [t_i, t_f]; t_prime is
/// snapped to the nearest grid node. Each order is assembled in O(N) from
/// cumulative Simpson sums of the factorised kernel products.
///
/// # Errors
///
/// [`Error::Config`] on fewer than three samples, a non-positive reference
/// frequency, a non-ascending window or t_prime outside it;
/// [`Error::WronskianSingular`] when omega0 T is a multiple of pi.
pub fn born_series(
    omega0: f64,
    v: &[f64],
    t_i: f64,
    t_f: f64,
    t_prime: f64,
) -> Result<[Vec<f64>; 3]> {
    let n = v.len();
    if n < 3 {
        return Err(Error::config("Born series needs at least three drive samples"));
    }
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(Error::config("reference frequency must be positive"));
    }
    if !(t_i.is_finite() && t_f.is_finite()) || t_f <= t_i {
        return Err(Error::config("window must satisfy t_f > t_i"));
    }
    let (grid, h) = uniform_grid(t_i, t_f, n);
    let jp = snapped_node(t_i, t_f, h, n, t_prime)?;

    let sin_total = (omega0 * (t_f - t_i)).sin();
    if sin_total.abs() < RELATIVE_CAUSTIC_TOL {
        return Err(Error::WronskianSingular {
            wronskian: -sin_total / omega0,
        });
    }
    let kappa = 1.0 / (omega0 * sin_total);

    let p: Vec<f64> = grid.iter().map(|&t| (omega0 * (t - t_i)).sin()).collect();
    let q: Vec<f64> = grid.iter().map(|&t| (omega0 * (t_f - t)).sin()).collect();

    let delta0: Vec<f64> = (0..n)
        .map(|j| {
            if j <= jp {
                kappa * p[j] * q[jp]
            } else {
                kappa * p[jp] * q[j]
            }
        })
        .collect();

    let pp: Vec<f64> = (0..n).map(|j| v[j] * p[j] * p[j]).collect();
    let pq: Vec<f64> = (0..n).map(|j| v[j] * p[j] * q[j]).collect();
    let qq: Vec<f64> = (0..n).map(|j| v[j] * q[j] * q[j]).collect();
    let cum_pp = cumulative_simpson(&pp, h);
    let cum_pq = cumulative_simpson(&pq, h);
    let cum_qq = cumulative_simpson(&qq, h);
    let qq_total = cum_qq[n - 1];

    let kappa_sq = kappa * kappa;
    let (p_p, q_p) = (p[jp], q[jp]);
    let delta1: Vec<f64> = (0..n)
        .map(|j| {
            if j <= jp {
                kappa_sq
                    * (q[j] * q_p * cum_pp[j]
                        + p[j] * q_p * (cum_pq[jp] - cum_pq[j])
                        + p[j] * p_p * (qq_total - cum_qq[jp]))
            } else {
                kappa_sq
                    * (q[j] * q_p * cum_pp[jp]
                        + q[j] * p_p * (cum_pq[j] - cum_pq[jp])
                        + p[j] * p_p * (qq_total - cum_qq[j]))
            }
        })
        .collect();

    let e: Vec<f64> = (0..n).map(|j| v[j] * p[j] * delta1[j]).collect();
    let f: Vec<f64> = (0..n).map(|j| v[j] * q[j] * delta1[j]).collect();
    let cum_e = cumulative_simpson(&e, h);
    let cum_f = cumulative_simpson(&f, h);
    let f_total = cum_f[n - 1];
    let delta2: Vec<f64> = (0..n)
        .map(|j| kappa * (q[j] * cum_e[j] + p[j] * (f_total - cum_f[j])))
        .collect();

    Ok([delta0, delta1, delta2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rms(v: &[f64]) -> f64 {
        (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
    }

    fn gaussian_drive(t: f64) -> f64 {
        (1.3 * t).cos() * (-t * t / 18.0).exp()
    }

    #[test]
    fn constant_frequency_matches_closed_form() {
        let omega = 2.0;
        let (t_i, t_f) = (0.0, 3.0);
        let n = 2001;
        let samples = vec![omega * omega; n];
        let (grid, _) = uniform_grid(t_i, t_f, n);
        let t_prime = grid[800];
        let delta = exact_green_oracle(&samples, t_i, t_f, t_prime).unwrap();
        let norm = omega * (omega * (t_f - t_i)).sin();
        for (j, (&t, &d)) in grid.iter().zip(&delta).enumerate() {
            let (lo, hi) = (t.min(t_prime), t.max(t_prime));
            let expected = (omega * (lo - t_i)).sin() * (omega * (t_f - hi)).sin() / norm;
            assert!(
                (d - expected).abs() < 1e-12,
                "node {j}: {d} vs {expected}"
            );
        }
    }

    #[test]
    fn caustic_window_rejected() {
        let n = 801;
        let samples = vec![4.0; n];
        assert!(matches!(
            exact_green_oracle(&samples, 0.0, std::f64::consts::PI, 1.0),
            Err(Error::WronskianSingular { .. })
        ));
        let v = vec![0.0; n];
        assert!(matches!(
            born_series(2.0, &v, 0.0, std::f64::consts::PI, 1.0),
            Err(Error::WronskianSingular { .. })
        ));
    }

    #[test]
    fn reciprocity_under_time_dependent_frequency() {
        let (t_i, t_f) = (-2.0, 2.0);
        let n = 1601;
        let (grid, _) = uniform_grid(t_i, t_f, n);
        let samples: Vec<f64> = grid.iter().map(|&t| 4.0 * (1.0 + 0.3 * t.cos())).collect();
        let (ja, jb) = (400, 1100);
        let da = exact_green_oracle(&samples, t_i, t_f, grid[ja]).unwrap();
        let db = exact_green_oracle(&samples, t_i, t_f, grid[jb]).unwrap();
        approx::assert_relative_eq!(da[jb], db[ja], max_relative = 1e-8);
    }

    #[test]
    fn born_zero_drive_reduces_to_free_propagator() {
        let omega = 2.0;
        let (t_i, t_f) = (0.0, 3.0);
        let n = 501;
        let v = vec![0.0; n];
        let (grid, _) = uniform_grid(t_i, t_f, n);
        let t_prime = grid[200];
        let [d0, d1, d2] = born_series(omega, &v, t_i, t_f, t_prime).unwrap();
        let exact = exact_green_oracle(&vec![omega * omega; n], t_i, t_f, t_prime).unwrap();
        for j in 0..n {
            assert!((d0[j] - exact[j]).abs() < 1e-12);
            assert_eq!(d1[j], 0.0);
            assert_eq!(d2[j], 0.0);
        }
    }

    #[test]
    fn born_first_order_matches_exact_antisymmetric_difference() {
        // (Delta(+eps) - Delta(-eps)) / 2 = Delta1(eps) + O(eps^3).
        let omega0 = 2.0;
        let (t_i, t_f) = (-15.1, 15.1);
        let n = 2049;
        let eps = 1e-3;
        let (grid, _) = uniform_grid(t_i, t_f, n);
        let t_prime = grid[1024];
        let w0 = omega0 * omega0;
        let plus: Vec<f64> = grid.iter().map(|&t| w0 * (1.0 + eps * gaussian_drive(t))).collect();
        let minus: Vec<f64> = grid.iter().map(|&t| w0 * (1.0 - eps * gaussian_drive(t))).collect();
        let v: Vec<f64> = grid.iter().map(|&t| w0 * eps * gaussian_drive(t)).collect();
        let dp = exact_green_oracle(&plus, t_i, t_f, t_prime).unwrap();
        let dm = exact_green_oracle(&minus, t_i, t_f, t_prime).unwrap();
        let [_, d1, _] = born_series(omega0, &v, t_i, t_f, t_prime).unwrap();
        let diff: Vec<f64> = (0..n).map(|j| 0.5 * (dp[j] - dm[j]) - d1[j]).collect();
        assert!(
            rms(&diff) < 1e-3 * rms(&d1),
            "first-order mismatch {} vs scale {}",
            rms(&diff),
            rms(&d1)
        );
    }

    #[test]
    fn second_order_residual_is_quadratic() {
        // Richardson check: (Delta - Delta0 - Delta1) shrinks fourfold when
        // the drive is halved.
        let omega0 = 2.0;
        let (t_i, t_f) = (-15.1, 15.1);
        let n = 2049;
        let (grid, _) = uniform_grid(t_i, t_f, n);
        let t_prime = grid[1024];
        let w0 = omega0 * omega0;
        let residual = |eps: f64| -> f64 {
            let w: Vec<f64> = grid.iter().map(|&t| w0 * (1.0 + eps * gaussian_drive(t))).collect();
            let v: Vec<f64> = grid.iter().map(|&t| w0 * eps * gaussian_drive(t)).collect();
            let exact = exact_green_oracle(&w, t_i, t_f, t_prime).unwrap();
            let [d0, d1, _] = born_series(omega0, &v, t_i, t_f, t_prime).unwrap();
            let r: Vec<f64> = (0..n).map(|j| exact[j] - d0[j] - d1[j]).collect();
            rms(&r)
        };
        let eps = 3e-3;
        let ratio = residual(eps) / residual(0.5 * eps);
        assert!((ratio - 4.0).abs() < 0.3, "Richardson ratio {ratio}");
    }

    #[test]
    fn third_order_residual_slope() {
        // Light version of the cubic-scaling gate: three drive strengths,
        // residual (exact - Delta0 - Delta1 - Delta2) slope 3 in log-log.
        let omega0 = 2.0;
        let (t_i, t_f) = (-15.1, 15.1);
        let n = 2049;
        let (grid, _) = uniform_grid(t_i, t_f, n);
        let t_prime = grid[1024];
        let w0 = omega0 * omega0;
        let mut ln_eps = Vec::new();
        let mut ln_res = Vec::new();
        for exp in 0..3 {
            let eps = 1e-3 * 10f64.powf(0.5 * exp as f64);
            let w: Vec<f64> = grid.iter().map(|&t| w0 * (1.0 + eps * gaussian_drive(t))).collect();
            let v: Vec<f64> = grid.iter().map(|&t| w0 * eps * gaussian_drive(t)).collect();
            let exact = exact_green_oracle(&w, t_i, t_f, t_prime).unwrap();
            let [d0, d1, d2] = born_series(omega0, &v, t_i, t_f, t_prime).unwrap();
            let r: Vec<f64> = (0..n).map(|j| exact[j] - d0[j] - d1[j] - d2[j]).collect();
            ln_eps.push(eps.ln());
            ln_res.push(rms(&r).ln());
        }
        let n_pts = ln_eps.len() as f64;
        let mx = ln_eps.iter().sum::<f64>() / n_pts;
        let my = ln_res.iter().sum::<f64>() / n_pts;
        let num: f64 = ln_eps.iter().zip(&ln_res).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = ln_eps.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = num / den;
        assert!((slope - 3.0).abs() < 0.15, "residual slope {slope}");
    }

    #[test]
    fn input_validation() {
        assert!(exact_green_oracle(&[4.0, 4.0], 0.0, 1.0, 0.5).is_err());
        assert!(exact_green_oracle(&[4.0; 16], 1.0, 0.0, 0.5).is_err());
        assert!(exact_green_oracle(&[4.0; 16], 0.0, 1.0, 2.0).is_err());
        assert!(born_series(0.0, &[0.0; 16], 0.0, 1.0, 0.5).is_err());
        assert!(born_series(2.0, &[0.0; 2], 0.0, 1.0, 0.5).is_err());
    }
}
