//! Perturbative mode propagators and the branch-projected two-time potential.
//!
//! Each polarisation resonance i carries a mode propagator Delta_i obeying
//! [d_t^2 + Omega_i^2 (1 + f_i(t))] Delta_i(t, t') = -delta(t - t') over the
//! drive window. Expanding in the drive and Fourier transforming gives, per
//! unit volume (the drive is spatially homogeneous),
//!
//! order 0: Delta0_i(omega) = 1 / (omega^2 - Omega_i^2), diagonal in
//! frequency; its 2 pi delta(omega + omega') factor is kept symbolic and
//! handled by callers, never sampled;
//!
//! order 1: Delta1_i(omega, omega') = Omega_i^2 f~_i(omega + omega')
//! / ((omega^2 - Omega_i^2)(omega'^2 - Omega_i^2));
//!
//! order 2: Delta2_i(omega, omega') = Omega_i^2 J_i(omega, omega + omega')
//! / ((omega^2 - Omega_i^2)(omega'^2 - Omega_i^2)), with the tone-overlap
//! integral
//!
//! J_i(omega, S) = (1/2pi) int domega'' Omega_i^2 f~_i(omega'')
//!                 f~_i(S - omega'') / ((omega - omega'')^2 - Omega_i^2).
//!
//! f~_i is the two-tone Gaussian drive spectrum of [`Modulation`]; only the
//! modulated resonance has f~_i != 0. The order-2 pole factor weights the
//! first external frequency only; that asymmetric bookkeeping is kept as is
//! because the emission amplitudes consume Delta2 in exactly this
//! combination.
//!
//! The amplitude assembly uses the branch-projected two-time potential at
//! fixed wavenumber and signed on-shell frequencies s omega_alpha,
//!
//! sigma^{alpha alpha'}(s omega_alpha, s' omega_alpha') =
//!   sqrt(C_alpha C_alpha') sum_i g_i^2 (s omega_alpha)(s' omega_alpha')
//!   [Delta1_i + Delta2_i],
//!
//! with Hopfield weights C_alpha and signs s, s' in {+, -}.
//!
//! [`oracle`] holds the exact time-domain boundary-value Green's function
//! and its Born series, used to validate the expansion order by order.

pub mod oracle;

use crate::branches::BranchModes;
use crate::medium::{Medium, Resonance, POLE_TOLERANCE};
use crate::modulation::Modulation;
use crate::numerics::quad::adaptive_gk;
use crate::{Error, Result};

/// Half-width of each spectral support segment, in units of 1/tau.
const SUPPORT_HALF_WIDTH: f64 = 8.0;

/// Relative tolerance of the order-2 tone-overlap quadrature.
const OVERLAP_REL_TOL: f64 = 1e-8;

/// Band |omega^2 - omega_alpha^2| <= NEAR_SHELL_TOL * omega_alpha^2 treated
/// as on shell by [`projection_weight`].
const NEAR_SHELL_TOL: f64 = 1e-6;

/// Evaluation route for the order-2 tone-overlap integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OverlapRoute {
    /// Adaptive quadrature over the drive support (ground truth).
    Quadrature,
    /// Resolved-tone closed form (Gaussian-product convolution).
    Analytic,
}

/// Sign of an on-shell frequency argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencySign {
    /// +omega_alpha.
    Plus,
    /// -omega_alpha.
    Minus,
}

impl FrequencySign {
    /// +1.0 or -1.0.
    pub fn signum(self) -> f64 {
        match self {
            FrequencySign::Plus => 1.0,
            FrequencySign::Minus => -1.0,
        }
    }
}

/// Drive-order split of the projected two-time potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSplit {
    /// Delta1 part, linear in the drive strength.
    pub first_order: f64,
    /// Delta2 part, quadratic in the drive strength.
    pub second_order: f64,
}

impl SigmaSplit {
    /// Sum of both orders.
    pub fn total(&self) -> f64 {
        self.first_order + self.second_order
    }
}

fn resonance_at(medium: &Medium, i: usize) -> Result<&Resonance> {
    medium.resonances().get(i).ok_or_else(|| {
        Error::config(format!(
            "resonance index {i} out of range for {} resonances",
            medium.resonances().len()
        ))
    })
}

fn guard_pole(omega: f64, r: &Resonance) -> Result<()> {
    if (omega.abs() - r.omega).abs() < POLE_TOLERANCE {
        return Err(Error::PoleAtResonance {
            omega,
            omega_res: r.omega,
            tolerance: POLE_TOLERANCE,
        });
    }
    Ok(())
}

pub(crate) fn branch_omega(modes: &BranchModes, alpha: usize) -> Result<f64> {
    modes.omegas.get(alpha).copied().ok_or_else(|| Error::InvalidProcess {
        message: format!(
            "branch {alpha} out of range for {} branches",
            modes.omegas.len()
        ),
    })
}

/// Order-0 mode propagator 1 / (omega^2 - Omega_i^2).
///
/// # Errors
///
/// [`Error::Config`] on a bad resonance index, [`Error::PoleAtResonance`]
/// within [`POLE_TOLERANCE`] of the resonance.
pub fn delta0(medium: &Medium, i: usize, omega: f64) -> Result<f64> {
    let r = resonance_at(medium, i)?;
    guard_pole(omega, r)?;
    Ok(1.0 / (omega * omega - r.omega * r.omega))
}

/// Order-1 mode propagator per unit volume,
/// Omega_i^2 f~(omega + omega') / ((omega^2 - Omega_i^2)(omega'^2 - Omega_i^2)).
///
/// Zero for resonances the drive does not target. Symmetric under
/// (omega, omega') exchange.
///
/// # Errors
///
/// As [`delta0`], for either frequency.
pub fn delta1_reduced(
    medium: &Medium,
    drive: &Modulation,
    i: usize,
    omega: f64,
    omega_p: f64,
) -> Result<f64> {
    let r = resonance_at(medium, i)?;
    guard_pole(omega, r)?;
    guard_pole(omega_p, r)?;
    if i != drive.resonance_index || drive.eps == 0.0 {
        return Ok(0.0);
    }
    let d = omega * omega - r.omega * r.omega;
    let d_p = omega_p * omega_p - r.omega * r.omega;
    Ok(r.omega * r.omega * drive.spectrum(omega + omega_p) / (d * d_p))
}

/// Order-2 mode propagator per unit volume; see the module header for the
/// tone-overlap integral J it wraps.
///
/// # Errors
///
/// As [`delta0`] for either frequency; [`Error::PoleInsideSupport`] when an
/// inner-integrand pole omega -+ Omega_i falls inside the drive support;
/// [`Error::QuadratureNotConverged`] from the inner quadrature.
pub fn delta2_reduced(
    medium: &Medium,
    drive: &Modulation,
    i: usize,
    omega: f64,
    omega_p: f64,
) -> Result<f64> {
    delta2_with_route(medium, drive, i, omega, omega_p, OverlapRoute::Quadrature)
}

pub(crate) fn delta2_with_route(
    medium: &Medium,
    drive: &Modulation,
    i: usize,
    omega: f64,
    omega_p: f64,
    route: OverlapRoute,
) -> Result<f64> {
    let r = resonance_at(medium, i)?;
    guard_pole(omega, r)?;
    guard_pole(omega_p, r)?;
    if i != drive.resonance_index || drive.eps == 0.0 {
        return Ok(0.0);
    }
    let j = match route {
        OverlapRoute::Quadrature => tone_overlap_quadrature(drive, r, omega, omega + omega_p)?,
        OverlapRoute::Analytic => tone_overlap_analytic(drive, r, omega, omega + omega_p),
    };
    let d = omega * omega - r.omega * r.omega;
    let d_p = omega_p * omega_p - r.omega * r.omega;
    Ok(r.omega * r.omega * j / (d * d_p))
}

/// Disjoint integration segments covering the drive spectral support:
/// [nu_a - w, nu_a + w] around every tone centre, w = [`SUPPORT_HALF_WIDTH`]
/// / tau, merged where they overlap.
fn support_segments(drive: &Modulation) -> Vec<(f64, f64)> {
    let w = SUPPORT_HALF_WIDTH / drive.tau;
    let mut centers = drive.tones();
    centers.sort_by(f64::total_cmp);
    let mut segments: Vec<(f64, f64)> = Vec::with_capacity(centers.len());
    for c in centers {
        let (lo, hi) = (c - w, c + w);
        match segments.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => segments.push((lo, hi)),
        }
    }
    segments
}

/// Tone-overlap integral J(omega, S) (module header) by adaptive quadrature
/// over the drive support segments.
///
/// # Errors
///
/// [`Error::PoleInsideSupport`] when omega -+ Omega_i falls inside a
/// segment (the narrow-band regime assumes it does not),
/// [`Error::QuadratureNotConverged`] on an exhausted subdivision budget.
pub(crate) fn tone_overlap_quadrature(
    drive: &Modulation,
    r: &Resonance,
    omega: f64,
    s_total: f64,
) -> Result<f64> {
    if drive.eps == 0.0 {
        return Ok(0.0);
    }
    let omega_r_sq = r.omega * r.omega;
    let segments = support_segments(drive);
    for &(lo, hi) in &segments {
        for pole in [omega - r.omega, omega + r.omega] {
            if (lo..=hi).contains(&pole) {
                return Err(Error::PoleInsideSupport { pole, lo, hi });
            }
        }
    }
    // Floor for spectrally dead segments, far below any resolvable overlap.
    let abs_floor = 1e-18 * (drive.eps * drive.tau).powi(2);
    let mut total = 0.0;
    for (lo, hi) in segments {
        total += adaptive_gk(
            |x| {
                let d = omega - x;
                drive.spectrum(x) * drive.spectrum(s_total - x) / (d * d - omega_r_sq)
            },
            lo,
            hi,
            OVERLAP_REL_TOL,
            abs_floor,
        )?;
    }
    Ok(omega_r_sq * total / (2.0 * std::f64::consts::PI))
}

/// Closed form of the tone-overlap integral in the resolved-tone regime:
/// the Gaussian product is convolved exactly and the pole factor is frozen
/// at each product centre mu_ab = (nu_a + S - nu_b)/2,
///
/// J(omega, S) ~= (sqrt(pi)/4) eps^2 tau sum_{a,b}
///   Omega_i^2 / ((omega - mu_ab)^2 - Omega_i^2)
///   exp(-tau^2 (S - nu_a - nu_b)^2 / 4),
///
/// accurate to O(1/(tau min nu)) relative to the quadrature route.
pub(crate) fn tone_overlap_analytic(
    drive: &Modulation,
    r: &Resonance,
    omega: f64,
    s_total: f64,
) -> f64 {
    if drive.eps == 0.0 {
        return 0.0;
    }
    let omega_r_sq = r.omega * r.omega;
    let tau = drive.tau;
    let mut sum = 0.0;
    for nu_a in drive.tones() {
        for nu_b in drive.tones() {
            let gap = s_total - nu_a - nu_b;
            let mid = 0.5 * (nu_a + s_total - nu_b);
            let d = omega - mid;
            sum += omega_r_sq / (d * d - omega_r_sq) * (-0.25 * tau * tau * gap * gap).exp();
        }
    }
    0.25 * std::f64::consts::PI.sqrt() * drive.eps * drive.eps * tau * sum
}

/// Coarse narrow-band estimate of the tone-overlap integral: each spectral
/// factor keeps its own Gaussian, the measure domega''/2pi is replaced by
/// 1/tau and the pole factor sits at the bare tone centre,
///
/// J_c(omega, S) = (pi/2) eps^2 tau sum_{a,b}
///   Omega_i^2 / ((omega - nu_a)^2 - Omega_i^2)
///   exp(-tau^2 (S - nu_a - nu_b)^2 / 2).
///
/// Kept as a reference point only: at an exact two-tone resonance it
/// overshoots the convolution route by the fixed factor 2 sqrt(pi), so the
/// amplitude assembly never uses it.
pub(crate) fn tone_overlap_coarse(
    drive: &Modulation,
    r: &Resonance,
    omega: f64,
    s_total: f64,
) -> f64 {
    if drive.eps == 0.0 {
        return 0.0;
    }
    let omega_r_sq = r.omega * r.omega;
    let tau = drive.tau;
    let mut sum = 0.0;
    for nu_a in drive.tones() {
        let d = omega - nu_a;
        let pole_factor = omega_r_sq / (d * d - omega_r_sq);
        for nu_b in drive.tones() {
            let gap = s_total - nu_a - nu_b;
            sum += pole_factor * (-0.5 * tau * tau * gap * gap).exp();
        }
    }
    0.5 * std::f64::consts::PI * drive.eps * drive.eps * tau * sum
}

/// Branch-projected two-time potential at signed on-shell frequencies,
/// split by drive order:
///
/// sigma^{alpha alpha'} = sqrt(C_alpha C_alpha') sum_i g_i^2
///   (s omega_alpha)(s' omega_alpha') [Delta1_i + Delta2_i].
///
/// Even under flipping both signs (the drive spectrum is even).
///
/// # Errors
///
/// [`Error::InvalidProcess`] on a bad branch index; pole and quadrature
/// errors from the propagator evaluations.
pub fn sigma_projected_split(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    alpha_p: usize,
    sign: FrequencySign,
    sign_p: FrequencySign,
) -> Result<SigmaSplit> {
    sigma_split_route(
        medium,
        modes,
        drive,
        alpha,
        alpha_p,
        sign,
        sign_p,
        OverlapRoute::Quadrature,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn sigma_split_route(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    alpha_p: usize,
    sign: FrequencySign,
    sign_p: FrequencySign,
    route: OverlapRoute,
) -> Result<SigmaSplit> {
    let w = sign.signum() * branch_omega(modes, alpha)?;
    let w_p = sign_p.signum() * branch_omega(modes, alpha_p)?;
    let weight = (modes.weights[alpha] * modes.weights[alpha_p]).sqrt();
    let mut first = 0.0;
    let mut second = 0.0;
    for (i, r) in medium.resonances().iter().enumerate() {
        if r.g == 0.0 {
            continue;
        }
        let g_sq = r.g * r.g;
        first += g_sq * w * w_p * delta1_reduced(medium, drive, i, w, w_p)?;
        second += g_sq * w * w_p * delta2_with_route(medium, drive, i, w, w_p, route)?;
    }
    Ok(SigmaSplit {
        first_order: weight * first,
        second_order: weight * second,
    })
}

/// Total of [`sigma_projected_split`].
///
/// # Errors
///
/// As [`sigma_projected_split`].
pub fn sigma_projected_onshell(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    alpha_p: usize,
    sign: FrequencySign,
    sign_p: FrequencySign,
) -> Result<f64> {
    Ok(sigma_projected_split(medium, modes, drive, alpha, alpha_p, sign, sign_p)?.total())
}

/// Projection weight P(omega) = sqrt((omega^2 - omega_alpha^2) / D(k, omega))
/// mapping a mode amplitude onto branch alpha near its shell. Within
/// [`NEAR_SHELL_TOL`] of the shell the exact limit, the square root of the
/// Hopfield weight, is substituted.
///
/// # Errors
///
/// [`Error::ProjectionDomain`] where the ratio is negative,
/// [`Error::InvalidProcess`] on a bad branch index, pole errors from the
/// dispersion function.
pub fn projection_weight(
    medium: &Medium,
    modes: &BranchModes,
    alpha: usize,
    omega: f64,
) -> Result<f64> {
    let omega_alpha = branch_omega(modes, alpha)?;
    let num = omega * omega - omega_alpha * omega_alpha;
    if num.abs() <= NEAR_SHELL_TOL * omega_alpha * omega_alpha {
        return Ok(modes.weights[alpha].sqrt());
    }
    let d = medium.dispersion_d(modes.k, omega)?;
    let ratio = num / d;
    if ratio < 0.0 {
        return Err(Error::ProjectionDomain {
            omega,
            omega_alpha,
            ratio,
        });
    }
    Ok(ratio.sqrt())
}

/// Time-domain response kernel chi(t) = sum_i g_i^2 (d^2/dt^2) D_i(t) on a
/// uniform lag grid, where D_i is the retarded unit-impulse solution of the
/// static resonance, [d^2/dt^2 + Omega_i^2] D_i = 0 with D_i(0) = 0,
/// D_i'(0) = -1, and zero at negative lag.
///
/// Diagnostic construction: the impulse solutions are integrated as ODEs and
/// differentiated by second central finite differences, so the result checks
/// the dispersion bookkeeping without reusing it. Lags below one grid step
/// (the contact delta at zero lag) and negative lags are reported as zero.
/// Interior values approach sum_i g_i^2 Omega_i sin(Omega_i t).
///
/// # Errors
///
/// [`Error::Config`] on a grid that is too short, non-ascending or
/// non-uniform; integration errors from the impulse solves.
pub fn susceptibility_chi(medium: &Medium, t_grid: &[f64]) -> Result<Vec<f64>> {
    let n = t_grid.len();
    if n < 5 {
        return Err(Error::config("susceptibility grid needs at least five samples"));
    }
    let h = (t_grid[n - 1] - t_grid[0]) / (n as f64 - 1.0);
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::config("susceptibility grid must ascend"));
    }
    for w in t_grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::config("susceptibility grid must be uniform"));
        }
    }

    let mut chi = vec![0.0; n];
    let j0 = match t_grid.iter().position(|&t| t >= -1e-12 * h) {
        Some(j) => j,
        None => return Ok(chi),
    };

    // Impulse-response path: lag 0 (for the initial conditions), the
    // non-negative grid lags, and one step past the end for the final
    // difference stencil.
    let mut path = Vec::with_capacity(n - j0 + 2);
    let prepended = t_grid[j0] > 1e-12 * h;
    if prepended {
        path.push(0.0);
    }
    path.extend_from_slice(&t_grid[j0..]);
    path.push(t_grid[n - 1] + h);

    let mut response = vec![0.0; path.len()];
    let opts = crate::numerics::ode::OdeOptions::default();
    for r in medium.resonances() {
        if r.g == 0.0 {
            continue;
        }
        let omega_sq = r.omega * r.omega;
        let states = crate::numerics::ode::integrate_path(
            |_, y: &[f64; 2]| [y[1], -omega_sq * y[0]],
            &path,
            [0.0, -1.0],
            &opts,
        )?;
        for (acc, y) in response.iter_mut().zip(&states) {
            *acc += r.g * r.g * y[0];
        }
    }

    let offset = usize::from(prepended);
    for j in j0..n {
        let lag = t_grid[j];
        if lag < h * (1.0 - 1e-9) {
            continue;
        }
        let p = j - j0 + offset;
        let left = if p == 0 { 0.0 } else { response[p - 1] };
        chi[j] = (left - 2.0 * response[p] + response[p + 1]) / (h * h);
    }
    Ok(chi)
}
