//! Pair-creation amplitudes, the emission spectrum and the rate estimate.
//!
//! A drive on one resonance converts the vacuum of two polariton branches
//! into correlated pairs. The one-pair amplitude at wavenumber k is
//! assembled from the branch-projected two-time potential sigma of
//! [`crate::propagators`] at the positive on-shell frequencies,
//!
//! G = (i/8) sigma^{alpha alpha'}(omega_alpha, omega_alpha')
//!     / sqrt(omega_alpha omega_alpha'),
//!
//! split into the order-1 part (single-tone Gaussians at
//! omega_alpha + omega_alpha' - nu_a) and the order-2 part carrying the
//! frequency-mixing overlap (Gaussians at omega_alpha + omega_alpha' -
//! nu_a - nu_b). Intrabranch pairs live on one branch (alpha' = alpha, the
//! condition reads 2 omega_alpha = sum of tones); interbranch pairs span
//! two branches and inherit the sqrt(C_alpha C_alpha') suppression. Terms
//! proportional to the drive spectrum at zero frequency are dropped; they
//! are double-exponentially small for resolved tones. The expansion is
//! truncated after the order-2 terms.
//!
//! The spectrum sweeps k, auto-refining around every root of a resonance
//! condition so Gaussian peaks are resolved, and reports per-process
//! probabilities |G|^2 plus the coherent total |sum G|^2. Emitted-photon
//! wavelengths are quoted in vacuum, lambda = 2 pi / omega of the most
//! photon-like branch involved.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::branches::{branch_modes, BranchModes};
use crate::medium::Medium;
use crate::modulation::Modulation;
use crate::propagators::{
    branch_omega, sigma_split_route, tone_overlap_analytic, tone_overlap_coarse,
    tone_overlap_quadrature, FrequencySign, OverlapRoute,
};
use crate::{Error, Result};

/// Peaks below PEAK_FLOOR_REL times the spectrum maximum are not reported.
const PEAK_FLOOR_REL: f64 = 1e-9;

/// Labels attach to conditions matched within LABEL_WINDOW / tau.
const LABEL_WINDOW: f64 = 3.0;

/// Label ties closer than TIE_WINDOW / tau report both conditions.
const TIE_WINDOW: f64 = 0.5;

/// Peak windows are refined out to REFINE_HALF_WIDTH / tau in the condition
/// frequency.
const REFINE_HALF_WIDTH: f64 = 6.0;

/// Refined sample spacing resolves 1 / (REFINE_POINTS_PER_WIDTH tau) in the
/// condition frequency.
const REFINE_POINTS_PER_WIDTH: f64 = 4.0;

/// Pair-creation channel at fixed wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    /// Both quanta on branch `alpha`.
    Intra {
        /// Branch index (ascending in frequency, from 0).
        alpha: usize,
    },
    /// One quantum on each of two distinct branches.
    Inter {
        /// First branch index.
        alpha: usize,
        /// Second branch index.
        alpha_p: usize,
    },
}

impl Process {
    /// Branch pair (alpha, alpha').
    pub fn branches(&self) -> (usize, usize) {
        match *self {
            Process::Intra { alpha } => (alpha, alpha),
            Process::Inter { alpha, alpha_p } => (alpha, alpha_p),
        }
    }

    /// Condition frequency omega_alpha + omega_alpha' at the given modes.
    fn condition_sum(&self, modes: &BranchModes) -> Result<f64> {
        let (a, ap) = self.branches();
        Ok(branch_omega(modes, a)? + branch_omega(modes, ap)?)
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Process::Intra { alpha } => write!(f, "intra({alpha})"),
            Process::Inter { alpha, alpha_p } => write!(f, "inter({alpha},{alpha_p})"),
        }
    }
}

/// Default channel set: the photon-like optical branch paired with itself
/// and with its lower neighbour. Remaining branches sit far from optical
/// modulation scales; sweep them by passing an explicit process list.
pub fn default_processes() -> Vec<Process> {
    vec![
        Process::Intra { alpha: 1 },
        Process::Inter { alpha: 1, alpha_p: 0 },
    ]
}

/// Evaluation mode for the order-2 mixing integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingMode {
    /// Adaptive quadrature of the tone-overlap integral (ground truth).
    Quadrature,
    /// Resolved-tone closed form; relative error O(1/(tau min nu)).
    Analytic,
}

/// Assembly options shared by the amplitude and spectrum entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmplitudeOptions {
    /// Route for the order-2 mixing integral.
    pub mixing_mode: MixingMode,
    /// Include the subleading interbranch correction (off by default; it is
    /// a product of two order-1 factors and stays well below the retained
    /// terms for resolved tones).
    pub include_subleading: bool,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        AmplitudeOptions {
            mixing_mode: MixingMode::Analytic,
            include_subleading: false,
        }
    }
}

impl MixingMode {
    fn route(self) -> OverlapRoute {
        match self {
            MixingMode::Quadrature => OverlapRoute::Quadrature,
            MixingMode::Analytic => OverlapRoute::Analytic,
        }
    }
}

/// One-pair vacuum transition amplitude at fixed wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAmplitude {
    /// Wavenumber (rad / um).
    pub k: f64,
    /// Channel the pair is created in.
    pub process: Process,
    /// Amplitude G; |G|^2 is the pair probability per mode.
    pub value: Complex64,
    /// (order-1 part, order-2 part); the parts sum to `value`.
    pub order_split: (Complex64, Complex64),
    /// Resonance conditions matched within [`LABEL_WINDOW`] / tau.
    pub labels: Vec<String>,
}

impl PairAmplitude {
    /// Pair probability |G|^2.
    pub fn probability(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Spectrum sample: every requested process evaluated at one wavenumber.
#[derive(Debug, Clone)]
pub struct SpectrumRow {
    /// Wavenumber (rad / um).
    pub k: f64,
    /// Vacuum wavelength 2 pi / omega of the most photon-like branch among
    /// the requested processes (um).
    pub lambda_vac: f64,
    /// Amplitudes in the order the processes were requested.
    pub amplitudes: Vec<PairAmplitude>,
    /// Coherent total |sum of amplitudes|^2.
    pub total: f64,
}

/// Spectrum rows plus non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Rows ascending in k.
    pub rows: Vec<SpectrumRow>,
    /// Grid-coarseness and perturbative-regime warnings.
    pub warnings: Vec<String>,
}

/// Located spectrum peak.
#[derive(Debug, Clone)]
pub struct Peak {
    /// Wavenumber of the maximum (rad / um).
    pub position_k: f64,
    /// Vacuum wavelength at the maximum (um).
    pub position_lambda: f64,
    /// Process and matched resonance condition, e.g. "intra(1):nu1+nu2";
    /// ties within [`TIE_WINDOW`] / tau list both, "unlabeled" if nothing
    /// matches within [`LABEL_WINDOW`] / tau.
    pub condition: String,
    /// Peak probability |G|^2.
    pub prob_max: f64,
    /// Full width at half maximum in k (rad / um).
    pub fwhm: f64,
}

/// Named condition frequencies sum(nu) reachable by tone combinations:
/// single tones, doubled tones, and the two-tone sum and difference.
/// Degenerate values collapse onto the first name.
fn resonance_targets(drive: &Modulation) -> Vec<(String, f64)> {
    let candidates = [
        ("nu1".to_string(), drive.nu1),
        ("nu2".to_string(), drive.nu2),
        ("2nu1".to_string(), 2.0 * drive.nu1),
        ("2nu2".to_string(), 2.0 * drive.nu2),
        ("nu1+nu2".to_string(), drive.nu1 + drive.nu2),
        ("nu1-nu2".to_string(), (drive.nu1 - drive.nu2).abs()),
    ];
    let scale = drive.nu1.max(drive.nu2);
    let mut targets: Vec<(String, f64)> = Vec::new();
    for (name, value) in candidates {
        if value <= 1e-12 * scale {
            continue;
        }
        if targets.iter().all(|(_, v)| (v - value).abs() > 1e-12 * scale) {
            targets.push((name, value));
        }
    }
    targets
}

/// Names of all targets within [`LABEL_WINDOW`] / tau of the condition sum.
fn condition_labels(drive: &Modulation, s: f64) -> Vec<String> {
    resonance_targets(drive)
        .into_iter()
        .filter(|(_, v)| (s - v).abs() <= LABEL_WINDOW / drive.tau)
        .map(|(name, _)| name)
        .collect()
}

fn positive_branch_omega(modes: &BranchModes, alpha: usize) -> Result<f64> {
    let w = branch_omega(modes, alpha)?;
    if w <= 0.0 {
        return Err(Error::InvalidProcess {
            message: format!("branch {alpha} has zero frequency at k = {}", modes.k),
        });
    }
    Ok(w)
}

/// Frequency-mixing integral sqrt(omega_alpha omega_alpha') J(omega_alpha,
/// omega_alpha + omega_alpha') entering the order-2 amplitude, where J is
/// the tone-overlap integral of [`crate::propagators`]. The pole weight
/// inside J sits at the first branch frequency, so the argument order
/// (alpha, alpha') matters for interbranch pairs.
///
/// # Errors
///
/// [`Error::InvalidProcess`] on a bad branch index or a zero-frequency
/// branch; pole and quadrature errors from the overlap integral.
pub fn mixing_integral(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    alpha_p: usize,
    mode: MixingMode,
) -> Result<f64> {
    let w = positive_branch_omega(modes, alpha)?;
    let w_p = positive_branch_omega(modes, alpha_p)?;
    let r = drive.resonance(medium)?;
    let s = w + w_p;
    let j = match mode {
        MixingMode::Quadrature => tone_overlap_quadrature(drive, r, w, s)?,
        MixingMode::Analytic => tone_overlap_analytic(drive, r, w, s),
    };
    Ok((w * w_p).sqrt() * j)
}

/// Coarse narrow-band variant of [`mixing_integral`]: per-tone Gaussians
/// with the measure replaced by 1/tau. Overshoots the convolution route by
/// 2 sqrt(pi) at exact two-tone resonance; kept as a pinned reference.
///
/// # Errors
///
/// As [`mixing_integral`].
pub fn mixing_integral_coarse(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    alpha_p: usize,
) -> Result<f64> {
    let w = positive_branch_omega(modes, alpha)?;
    let w_p = positive_branch_omega(modes, alpha_p)?;
    let r = drive.resonance(medium)?;
    Ok((w * w_p).sqrt() * tone_overlap_coarse(drive, r, w, w + w_p))
}

fn assemble_split(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    alpha_p: usize,
    opts: &AmplitudeOptions,
) -> Result<(Complex64, Complex64)> {
    let w = positive_branch_omega(modes, alpha)?;
    let w_p = positive_branch_omega(modes, alpha_p)?;
    let split = sigma_split_route(
        medium,
        modes,
        drive,
        alpha,
        alpha_p,
        FrequencySign::Plus,
        FrequencySign::Plus,
        opts.mixing_mode.route(),
    )?;
    let denom = 8.0 * (w * w_p).sqrt();
    Ok((
        Complex64::new(0.0, split.first_order / denom),
        Complex64::new(0.0, split.second_order / denom),
    ))
}

/// Intrabranch pair amplitude on branch `alpha` (condition
/// 2 omega_alpha = sum of tones).
///
/// # Errors
///
/// [`Error::InvalidProcess`] on a bad branch index or a zero-frequency
/// branch; pole and quadrature errors from the propagator evaluations.
pub fn g_intra(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    opts: &AmplitudeOptions,
) -> Result<PairAmplitude> {
    let (first, second) = assemble_split(medium, modes, drive, alpha, alpha, opts)?;
    let s = 2.0 * positive_branch_omega(modes, alpha)?;
    Ok(PairAmplitude {
        k: modes.k,
        process: Process::Intra { alpha },
        value: first + second,
        order_split: (first, second),
        labels: condition_labels(drive, s),
    })
}

/// Interbranch pair amplitude across branches `alpha` and `alpha_p`
/// (condition omega_alpha + omega_alpha' = sum of tones). The optional
/// subleading correction multiplies two order-1 factors and folds into the
/// order-2 part.
///
/// # Errors
///
/// [`Error::InvalidProcess`] when alpha = alpha_p, on a bad branch index or
/// a zero-frequency branch; pole and quadrature errors from the propagator
/// evaluations.
pub fn g_inter(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    alpha: usize,
    alpha_p: usize,
    opts: &AmplitudeOptions,
) -> Result<PairAmplitude> {
    if alpha == alpha_p {
        return Err(Error::InvalidProcess {
            message: format!("interbranch pair needs distinct branches, got ({alpha}, {alpha_p})"),
        });
    }
    let (first, mut second) = assemble_split(medium, modes, drive, alpha, alpha_p, opts)?;
    let w = positive_branch_omega(modes, alpha)?;
    let w_p = positive_branch_omega(modes, alpha_p)?;
    if opts.include_subleading {
        let route = opts.mixing_mode.route();
        let mixed = sigma_split_route(
            medium,
            modes,
            drive,
            alpha,
            alpha_p,
            FrequencySign::Minus,
            FrequencySign::Plus,
            route,
        )?
        .first_order;
        let own = sigma_split_route(
            medium,
            modes,
            drive,
            alpha,
            alpha,
            FrequencySign::Plus,
            FrequencySign::Plus,
            route,
        )?
        .first_order;
        let sub = -mixed * own / (128.0 * (w.powi(3) * w_p).sqrt());
        second += Complex64::new(0.0, sub);
    }
    Ok(PairAmplitude {
        k: modes.k,
        process: Process::Inter { alpha, alpha_p },
        value: first + second,
        order_split: (first, second),
        labels: condition_labels(drive, w + w_p),
    })
}

fn amplitude_for(
    medium: &Medium,
    modes: &BranchModes,
    drive: &Modulation,
    process: Process,
    opts: &AmplitudeOptions,
) -> Result<PairAmplitude> {
    match process {
        Process::Intra { alpha } => g_intra(medium, modes, drive, alpha, opts),
        Process::Inter { alpha, alpha_p } => g_inter(medium, modes, drive, alpha, alpha_p, opts),
    }
}

fn row_at(
    medium: &Medium,
    drive: &Modulation,
    k: f64,
    processes: &[Process],
    opts: &AmplitudeOptions,
) -> Result<SpectrumRow> {
    let modes = branch_modes(medium, k)?;
    let amplitudes: Vec<PairAmplitude> = processes
        .iter()
        .map(|&p| amplitude_for(medium, &modes, drive, p, opts))
        .collect::<Result<_>>()?;
    let total = amplitudes
        .iter()
        .map(|a| a.value)
        .sum::<Complex64>()
        .norm_sqr();

    let mut best: Option<usize> = None;
    for process in processes {
        let (a, ap) = process.branches();
        for b in [a, ap] {
            if best.is_none_or(|cur| modes.weights[b] > modes.weights[cur]) {
                best = Some(b);
            }
        }
    }
    let branch = best.expect("processes is non-empty");
    let omega = modes.omegas[branch];
    let lambda_vac = if omega > 0.0 {
        2.0 * std::f64::consts::PI / omega
    } else {
        f64::INFINITY
    };

    Ok(SpectrumRow {
        k,
        lambda_vac,
        amplitudes,
        total,
    })
}

/// Smallest k with condition_sum(k) = s_target, or None when the condition
/// is unreachable on these branches. condition_sum is strictly increasing
/// in k, so bisection from a doubling bracket converges unconditionally.
fn solve_condition_k(medium: &Medium, process: Process, s_target: f64) -> Result<Option<f64>> {
    let s_of = |k: f64| -> Result<f64> {
        let modes = branch_modes(medium, k)?;
        process.condition_sum(&modes)
    };
    let mut lo = 0.0;
    if s_of(lo)? >= s_target {
        return Ok(None);
    }
    let mut hi = 1.0;
    let mut tries = 0;
    while s_of(hi)? < s_target {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Ok(None);
        }
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if s_of(mid)? < s_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// d(condition_sum)/dk at k: the sum of on-shell group velocities 1 / n_g
/// of the branches involved.
fn condition_slope(medium: &Medium, process: Process, k: f64) -> Result<f64> {
    let modes = branch_modes(medium, k)?;
    let (a, ap) = process.branches();
    let mut slope = 0.0;
    for b in [a, ap] {
        let omega = positive_branch_omega(&modes, b)?;
        slope += 1.0 / medium.group_index(omega)?;
    }
    Ok(slope)
}

/// Gap between the input-grid neighbours bracketing k, if any.
fn bracket_gap(sorted: &[f64], k: f64) -> Option<f64> {
    if sorted.len() < 2 || k < sorted[0] || k > sorted[sorted.len() - 1] {
        return None;
    }
    let hi = sorted.partition_point(|&x| x < k);
    if hi == 0 || hi >= sorted.len() {
        return None;
    }
    Some(sorted[hi] - sorted[hi - 1])
}

/// Emission-probability spectrum over k: the requested processes evaluated
/// on the union of `k_grid` and auto-refined windows around every reachable
/// resonance condition. Rows ascend in k; per-row totals are coherent.
/// Warnings flag input spacing too coarse to resolve a peak (the refinement
/// already compensates) and amplitudes outside the perturbative regime.
///
/// # Errors
///
/// [`Error::Config`] on a non-positive or non-finite grid entry,
/// [`Error::InvalidProcess`] on an empty process list or bad branch
/// indices; propagated evaluation errors.
pub fn spectrum(
    medium: &Medium,
    drive: &Modulation,
    k_grid: &[f64],
    processes: &[Process],
    opts: &AmplitudeOptions,
) -> Result<SpectrumResult> {
    if processes.is_empty() {
        return Err(Error::InvalidProcess {
            message: "spectrum needs at least one process".to_string(),
        });
    }
    for &k in k_grid {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::config(format!("k grid entries must be positive, got {k}")));
        }
    }
    let mut input = k_grid.to_vec();
    input.sort_by(f64::total_cmp);

    let mut ks = input.clone();
    let mut warnings = Vec::new();

    if drive.eps != 0.0 {
        let targets = resonance_targets(drive);
        for &process in processes {
            for (name, s_target) in &targets {
                let Some(k_star) = solve_condition_k(medium, process, *s_target)? else {
                    continue;
                };
                let slope = condition_slope(medium, process, k_star)?;
                let dk = 1.0 / (REFINE_POINTS_PER_WIDTH * drive.tau * slope);
                let steps = (REFINE_HALF_WIDTH * REFINE_POINTS_PER_WIDTH).ceil() as i64;
                for j in -steps..=steps {
                    let k = k_star + j as f64 * dk;
                    if k > 0.0 {
                        ks.push(k);
                    }
                }
                if let Some(gap) = bracket_gap(&input, k_star) {
                    if gap > dk {
                        warnings.push(format!(
                            "grid too coarse near {process} condition {name} at k = {k_star:.6}: \
                             spacing {gap:.3e} exceeds required {dk:.3e}; refined with {} points",
                            2 * steps + 1
                        ));
                    }
                }
            }
        }
    }

    ks.sort_by(f64::total_cmp);
    ks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());

    let rows: Vec<SpectrumRow> = ks
        .par_iter()
        .map(|&k| row_at(medium, drive, k, processes, opts))
        .collect::<Result<_>>()?;

    if let Some(row) = rows
        .iter()
        .find(|row| row.amplitudes.iter().any(|a| a.probability() > 1.0))
    {
        warnings.push(format!(
            "perturbative guard: |G|^2 exceeds 1 at k = {:.6}",
            row.k
        ));
    }

    Ok(SpectrumResult { rows, warnings })
}

/// Condition string for a peak of `process` at wavenumber k: nearest target
/// within [`LABEL_WINDOW`] / tau, with ties within [`TIE_WINDOW`] / tau
/// reporting both names.
fn peak_condition(
    medium: &Medium,
    drive: &Modulation,
    process: Process,
    k: f64,
) -> Result<String> {
    let modes = branch_modes(medium, k)?;
    let s = process.condition_sum(&modes)?;
    let mut by_distance: Vec<(f64, String)> = resonance_targets(drive)
        .into_iter()
        .map(|(name, v)| ((s - v).abs(), name))
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0));
    let label = match by_distance.first() {
        Some((d, name)) if *d <= LABEL_WINDOW / drive.tau => {
            let mut label = name.clone();
            if let Some((d2, name2)) = by_distance.get(1) {
                if (d2 - d).abs() <= TIE_WINDOW / drive.tau
                    && *d2 <= LABEL_WINDOW / drive.tau
                {
                    label = format!("{label}|{name2}");
                }
            }
            label
        }
        _ => "unlabeled".to_string(),
    };
    Ok(format!("{process}:{label}"))
}

fn half_crossing(k_in: f64, p_in: f64, k_out: f64, p_out: f64, half: f64) -> f64 {
    if (p_in - p_out).abs() < f64::MIN_POSITIVE {
        return k_out;
    }
    k_in + (k_out - k_in) * (p_in - half) / (p_in - p_out)
}

/// Locate per-process spectrum peaks: strict local maxima above
/// [`PEAK_FLOOR_REL`] times the global maximum, with the matched condition
/// and the full width at half maximum (in k, linearly interpolated).
///
/// # Errors
///
/// Propagated branch evaluations while labelling conditions.
pub fn find_peaks(
    medium: &Medium,
    drive: &Modulation,
    rows: &[SpectrumRow],
) -> Result<Vec<Peak>> {
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    let n_proc = first.amplitudes.len();
    let global_max = rows
        .iter()
        .flat_map(|r| r.amplitudes.iter().map(PairAmplitude::probability))
        .fold(0.0f64, f64::max);
    if global_max <= 0.0 {
        return Ok(Vec::new());
    }
    let floor = PEAK_FLOOR_REL * global_max;

    let mut peaks = Vec::new();
    for i in 0..n_proc {
        let probs: Vec<f64> = rows.iter().map(|r| r.amplitudes[i].probability()).collect();
        for j in 1..rows.len().saturating_sub(1) {
            if !(probs[j] >= floor && probs[j] > probs[j - 1] && probs[j] >= probs[j + 1]) {
                continue;
            }
            let half = 0.5 * probs[j];
            let mut left = rows[0].k;
            for l in (0..j).rev() {
                if probs[l] <= half {
                    left = half_crossing(rows[l + 1].k, probs[l + 1], rows[l].k, probs[l], half);
                    break;
                }
            }
            let mut right = rows[rows.len() - 1].k;
            for r in j + 1..rows.len() {
                if probs[r] <= half {
                    right = half_crossing(rows[r - 1].k, probs[r - 1], rows[r].k, probs[r], half);
                    break;
                }
            }
            peaks.push(Peak {
                position_k: rows[j].k,
                position_lambda: rows[j].lambda_vac,
                condition: peak_condition(medium, drive, rows[j].amplitudes[i].process, rows[j].k)?,
                prob_max: probs[j],
                fwhm: right - left,
            });
        }
    }
    peaks.sort_by(|a, b| a.position_k.total_cmp(&b.position_k));
    Ok(peaks)
}

/// Pairs emitted per pulse per unit angle from a modulated spot of area
/// `a_spot` (um^2): the peak nearest `lambda_mix` (um) contributes
/// a_spot (2 pi / tau) (2 pi / lambda_peak) |G|^2_peak. Returns 0 when the
/// spectrum has no peaks.
pub fn emission_rate_per_angle(peaks: &[Peak], a_spot: f64, lambda_mix: f64, tau: f64) -> f64 {
    let Some(peak) = peaks.iter().min_by(|a, b| {
        (a.position_lambda - lambda_mix)
            .abs()
            .total_cmp(&(b.position_lambda - lambda_mix).abs())
    }) else {
        return 0.0;
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    a_spot * (two_pi / tau) * (two_pi / peak.position_lambda) * peak.prob_max
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    fn silica_reference() -> (Medium, Modulation) {
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        (m, md)
    }

    /// Frozen reference points for the fused-silica default drive
    /// (wavenumber, |G|^2), from an independent evaluation of the closed
    /// forms at each condition root.
    const DCE_PEAK: (f64, f64) = (7.829_45, 2.010_9e-4);
    const MIX_PEAK: (f64, f64) = (14.438_25, 1.618_1e-8);
    const INTER_NU1_PEAK: (f64, f64) = (14.831_58, 2.894_0e-10);
    const INTER_NU2_PEAK: (f64, f64) = (12.178_73, 5.163_5e-10);

    fn default_run() -> &'static (Vec<SpectrumRow>, Vec<Peak>) {
        static RUN: OnceLock<(Vec<SpectrumRow>, Vec<Peak>)> = OnceLock::new();
        RUN.get_or_init(|| {
            let (m, md) = silica_reference();
            let k_grid: Vec<f64> = (0..23).map(|j| 6.0 + j as f64 * 0.5).collect();
            let result = spectrum(
                &m,
                &md,
                &k_grid,
                &default_processes(),
                &AmplitudeOptions::default(),
            )
            .unwrap();
            let peaks = find_peaks(&m, &md, &result.rows).unwrap();
            (result.rows, peaks)
        })
    }

    #[test]
    fn mixing_integral_frozen_at_two_tone_peak() {
        let (m, md) = silica_reference();
        let modes = branch_modes(&m, MIX_PEAK.0).unwrap();
        let frozen = -5.007_58e-3;
        let quad = mixing_integral(&m, &modes, &md, 1, 1, MixingMode::Quadrature).unwrap();
        let analytic = mixing_integral(&m, &modes, &md, 1, 1, MixingMode::Analytic).unwrap();
        assert_relative_eq!(quad, frozen, max_relative = 1e-3);
        assert_relative_eq!(analytic, frozen, max_relative = 1e-3);
        let coarse = mixing_integral_coarse(&m, &modes, &md, 1, 1).unwrap();
        assert_relative_eq!(coarse, -1.775_14e-2, max_relative = 1e-3);
    }

    #[test]
    fn mixing_integral_zero_drive() {
        let (m, mut md) = silica_reference();
        md.eps = 0.0;
        let modes = branch_modes(&m, MIX_PEAK.0).unwrap();
        assert_eq!(
            mixing_integral(&m, &modes, &md, 1, 1, MixingMode::Quadrature).unwrap(),
            0.0
        );
        assert_eq!(
            mixing_integral(&m, &modes, &md, 1, 1, MixingMode::Analytic).unwrap(),
            0.0
        );
    }

    #[test]
    fn intra_amplitude_frozen_at_dce_peak() {
        let (m, md) = silica_reference();
        let modes = branch_modes(&m, DCE_PEAK.0).unwrap();
        let amp = g_intra(&m, &modes, &md, 1, &AmplitudeOptions::default()).unwrap();
        assert_relative_eq!(amp.probability(), DCE_PEAK.1, max_relative = 1e-3);
        // Single-tone condition: order-1 dominates and order-2 is dead.
        assert!(amp.order_split.1.norm() < 1e-12 * amp.order_split.0.norm());
        assert_eq!(amp.value, amp.order_split.0 + amp.order_split.1);
        assert!(amp.labels.contains(&"nu1".to_string()));
        // The amplitude is purely imaginary in this convention.
        assert_eq!(amp.value.re, 0.0);
    }

    #[test]
    fn intra_amplitude_frozen_at_mixing_peak() {
        let (m, md) = silica_reference();
        let modes = branch_modes(&m, MIX_PEAK.0).unwrap();
        for mode in [MixingMode::Quadrature, MixingMode::Analytic] {
            let opts = AmplitudeOptions {
                mixing_mode: mode,
                include_subleading: false,
            };
            let amp = g_intra(&m, &modes, &md, 1, &opts).unwrap();
            assert_relative_eq!(amp.probability(), MIX_PEAK.1, max_relative = 1e-3);
            // Two-tone condition: order-1 is dead, order-2 carries the peak.
            assert!(amp.order_split.0.norm() < 1e-12 * amp.order_split.1.norm());
            assert!(amp.labels.contains(&"nu1+nu2".to_string()));
        }
    }

    #[test]
    fn inter_amplitudes_frozen() {
        let (m, md) = silica_reference();
        let opts = AmplitudeOptions::default();
        for (peak, label) in [(INTER_NU1_PEAK, "nu1"), (INTER_NU2_PEAK, "nu2")] {
            let modes = branch_modes(&m, peak.0).unwrap();
            let amp = g_inter(&m, &modes, &md, 1, 0, &opts).unwrap();
            assert_relative_eq!(amp.probability(), peak.1, max_relative = 1e-3);
            assert!(amp.labels.contains(&label.to_string()), "missing {label}");
        }
    }

    #[test]
    fn inter_rejects_equal_branches() {
        let (m, md) = silica_reference();
        let modes = branch_modes(&m, 10.0).unwrap();
        assert!(matches!(
            g_inter(&m, &modes, &md, 1, 1, &AmplitudeOptions::default()),
            Err(Error::InvalidProcess { .. })
        ));
    }

    #[test]
    fn amplitudes_vanish_without_drive() {
        let (m, mut md) = silica_reference();
        md.eps = 0.0;
        let modes = branch_modes(&m, DCE_PEAK.0).unwrap();
        let opts = AmplitudeOptions::default();
        assert_eq!(
            g_intra(&m, &modes, &md, 1, &opts).unwrap().value,
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            g_inter(&m, &modes, &md, 1, 0, &opts).unwrap().value,
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn tone_exchange_symmetry() {
        let (m, md) = silica_reference();
        let mut swapped = md;
        std::mem::swap(&mut swapped.nu1, &mut swapped.nu2);
        let opts = AmplitudeOptions::default();
        for k in [DCE_PEAK.0, MIX_PEAK.0, INTER_NU2_PEAK.0] {
            let modes = branch_modes(&m, k).unwrap();
            let a = g_intra(&m, &modes, &md, 1, &opts).unwrap();
            let b = g_intra(&m, &modes, &swapped, 1, &opts).unwrap();
            assert_relative_eq!(a.probability(), b.probability(), max_relative = 1e-12);
        }
    }

    #[test]
    fn probability_scaling_with_drive_strength() {
        // Order-1 peaks scale as eps^2, mixing peaks as eps^4.
        let (m, md) = silica_reference();
        let dce_modes = branch_modes(&m, DCE_PEAK.0).unwrap();
        let mix_modes = branch_modes(&m, MIX_PEAK.0).unwrap();
        let opts = AmplitudeOptions::default();
        let mut ln_eps = Vec::new();
        let mut ln_p1 = Vec::new();
        let mut ln_p2 = Vec::new();
        for exp in 0..5 {
            let mut scaled = md;
            scaled.eps = 1e-3 * 10f64.powf(0.25 * exp as f64);
            ln_eps.push(scaled.eps.ln());
            ln_p1.push(
                g_intra(&m, &dce_modes, &scaled, 1, &opts)
                    .unwrap()
                    .probability()
                    .ln(),
            );
            ln_p2.push(
                g_intra(&m, &mix_modes, &scaled, 1, &opts)
                    .unwrap()
                    .probability()
                    .ln(),
            );
        }
        let slope = |ys: &[f64]| {
            let n = ln_eps.len() as f64;
            let mx = ln_eps.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let num: f64 = ln_eps.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let den: f64 = ln_eps.iter().map(|x| (x - mx) * (x - mx)).sum();
            num / den
        };
        let s1 = slope(&ln_p1);
        let s2 = slope(&ln_p2);
        assert!((s1 - 2.0).abs() <= 0.05, "order-1 slope {s1}");
        assert!((s2 - 4.0).abs() <= 0.05, "mixing slope {s2}");
    }

    #[test]
    fn default_spectrum_has_expected_strong_peaks() {
        let (rows, peaks) = default_run();
        assert!(!rows.is_empty());
        let max = peaks.iter().map(|p| p.prob_max).fold(0.0f64, f64::max);
        let expected = [
            ("intra(1):nu1", DCE_PEAK),
            ("intra(1):nu2", (6.512_65, 1.384_4e-4)),
            ("intra(1):nu1+nu2", MIX_PEAK),
            ("intra(1):2nu1", (15.769_29, 4.899_5e-9)),
            ("intra(1):2nu2", (13.110_99, 3.286_6e-9)),
            ("inter(1,0):nu1", INTER_NU1_PEAK),
            ("inter(1,0):nu2", INTER_NU2_PEAK),
        ];
        for (condition, (k, prob)) in expected {
            let matches: Vec<&Peak> = peaks
                .iter()
                .filter(|p| p.condition == condition)
                .collect();
            assert_eq!(matches.len(), 1, "{condition}: {matches:#?}");
            let peak = matches[0];
            assert!(
                (peak.position_k - k).abs() < 0.05,
                "{condition} at {} expected {k}",
                peak.position_k
            );
            assert_relative_eq!(peak.prob_max, prob, max_relative = 1e-3);
        }
        // Anything outside the expected set stays far below the maximum.
        for peak in peaks {
            if !expected.iter().any(|(c, _)| *c == peak.condition) {
                assert!(
                    peak.prob_max < 1e-3 * max,
                    "unexpected strong peak {peak:#?}"
                );
            }
        }
    }

    #[test]
    fn spectrum_rows_total_is_coherent_sum()  {
        let (rows, _) = default_run();
        for row in rows {
            let coherent = row
                .amplitudes
                .iter()
                .map(|a| a.value)
                .sum::<Complex64>()
                .norm_sqr();
            assert_relative_eq!(row.total, coherent, max_relative = 1e-12, epsilon = 1e-300);
        }
    }

    #[test]
    fn isolated_peak_total_matches_single_process() {
        let (rows, _) = default_run();
        let dce = rows
            .iter()
            .min_by(|a, b| {
                (a.k - DCE_PEAK.0).abs().total_cmp(&(b.k - DCE_PEAK.0).abs())
            })
            .unwrap();
        let intra = dce.amplitudes[0].probability();
        assert_relative_eq!(dce.total, intra, max_relative = 1e-6);
    }

    #[test]
    fn peak_width_matches_drive_envelope() {
        // FWHM in the condition frequency is 2 sqrt(ln 2) / tau.
        let (m, md) = silica_reference();
        let (_, peaks) = default_run();
        let dce = peaks
            .iter()
            .find(|p| p.condition == "intra(1):nu1")
            .unwrap();
        let slope = condition_slope(&m, Process::Intra { alpha: 1 }, dce.position_k).unwrap();
        let fwhm_s = dce.fwhm * slope;
        let expected = 2.0 * (2.0f64.ln()).sqrt() / md.tau;
        assert_relative_eq!(fwhm_s, expected, max_relative = 0.1);
    }

    #[test]
    fn spectrum_zero_drive_is_flat_zero() {
        let (m, mut md) = silica_reference();
        md.eps = 0.0;
        let k_grid: Vec<f64> = (1..20).map(|j| j as f64).collect();
        let result = spectrum(
            &m,
            &md,
            &k_grid,
            &default_processes(),
            &AmplitudeOptions::default(),
        )
        .unwrap();
        assert_eq!(result.rows.len(), k_grid.len());
        for row in &result.rows {
            assert_eq!(row.total, 0.0);
        }
        assert!(find_peaks(&m, &md, &result.rows).unwrap().is_empty());
    }

    #[test]
    fn degenerate_tones_collapse_labels() {
        let (m, md) = silica_reference();
        let single = Modulation::new(1, md.eps, md.nu1, md.nu1, md.tau).unwrap();
        let targets = resonance_targets(&single);
        let names: Vec<&str> = targets.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["nu1", "2nu1"]);
        let result = spectrum(
            &m,
            &single,
            &[],
            &default_processes(),
            &AmplitudeOptions::default(),
        )
        .unwrap();
        let peaks = find_peaks(&m, &single, &result.rows).unwrap();
        let conditions: Vec<&str> = peaks.iter().map(|p| p.condition.as_str()).collect();
        assert!(conditions.contains(&"intra(1):nu1"), "{conditions:?}");
        assert!(conditions.contains(&"intra(1):2nu1"), "{conditions:?}");
        assert!(conditions.contains(&"inter(1,0):nu1"), "{conditions:?}");
    }

    #[test]
    fn coarse_input_grid_warns_and_refines() {
        let (m, md) = silica_reference();
        let k_grid = [6.0, 10.0, 16.0];
        let result = spectrum(
            &m,
            &md,
            &k_grid,
            &[Process::Intra { alpha: 1 }],
            &AmplitudeOptions::default(),
        )
        .unwrap();
        assert!(result
            .warnings
            .iter()
            .any(|w| w.contains("grid too coarse")));
        assert!(result.rows.len() > k_grid.len());
    }

    #[test]
    fn spectrum_rejects_bad_grid() {
        let (m, md) = silica_reference();
        assert!(spectrum(
            &m,
            &md,
            &[1.0, -2.0],
            &default_processes(),
            &AmplitudeOptions::default()
        )
        .is_err());
        assert!(spectrum(&m, &md, &[1.0], &[], &AmplitudeOptions::default()).is_err());
    }

    #[test]
    fn rate_estimate_frozen() {
        let (_, md) = silica_reference();
        let (_, peaks) = default_run();
        let rate = emission_rate_per_angle(peaks, 250.0, 0.65, md.tau);
        assert_relative_eq!(rate, 1.978_6e-5, max_relative = 2e-3);
        assert_relative_eq!(
            emission_rate_per_angle(peaks, 500.0, 0.65, md.tau),
            2.0 * rate,
            max_relative = 1e-12
        );
        assert_eq!(emission_rate_per_angle(&[], 250.0, 0.65, md.tau), 0.0);
    }
}
