//! Sweep execution and file emission behind the CLI.
//!
//! Each `run_*` function resolves domain objects from a [`RunConfig`],
//! evaluates the physics modules and renders a report. All numeric work is
//! dispatched as pure per-wavenumber tasks on a bounded worker pool sized
//! by `run.threads` (0 keeps the pool default); assembly is single-threaded
//! and ordered, so every report is byte-identical across runs and thread
//! counts. CSV numbers carry 17 significant digits; the JSON peak report
//! rounds to 6 for readability.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::amplitudes::{
    emission_rate_per_angle, find_peaks, spectrum, Peak, SpectrumResult,
};
use crate::branches::branch_modes;
use crate::config::{OracleSection, RunConfig};
use crate::propagators::oracle::{born_series, exact_green_oracle};
use crate::states;
use crate::{Error, Result};

/// Everything a spectrum run produced, with rendered file bodies.
#[derive(Debug)]
pub struct SpectrumArtifacts {
    /// Spectrum table body.
    pub csv: String,
    /// Peak report body.
    pub peaks_json: String,
    /// Resolved config body; reloading it reproduces the run exactly.
    pub resolved_toml: String,
    /// Labeled peaks, ascending in k.
    pub peaks: Vec<Peak>,
    /// Warnings accumulated during the sweep.
    pub warnings: Vec<String>,
    /// Spectrum rows evaluated (input grid plus refinement).
    pub rows: usize,
}

/// Rows appended to the progress log per assembly chunk.
const LOG_CHUNK_ROWS: usize = 128;

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if threads == 0 {
        return job();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("worker pool: {e}")))?;
    pool.install(job)
}

/// Runs the configured sweep and renders the spectrum CSV, the peak
/// report and the resolved config. Progress goes to `log`, one line per
/// assembled chunk of rows.
///
/// # Errors
///
/// Propagates config and numeric errors from the sweep.
pub fn run_spectrum(config: &RunConfig, log: &mut dyn Write) -> Result<SpectrumArtifacts> {
    let medium = config.medium()?;
    let drive = config.modulation()?;
    let processes = config.processes();
    let opts = config.amplitude_options();
    let grid = config.k_grid();

    writeln!(
        log,
        "spectrum: {} input points on k [{}, {}] rad/um, {} processes, {} mixing",
        grid.len(),
        config.sweep.k_min_rad_um,
        config.sweep.k_max_rad_um,
        processes.len(),
        config.run.mixing_mode,
    )?;
    let result = with_pool(config.run.threads, || {
        spectrum(&medium, &drive, &grid, &processes, &opts)
    })?;
    for warning in &result.warnings {
        writeln!(log, "warning: {warning}")?;
    }

    let csv = spectrum_csv(&result);
    let mut assembled = 0usize;
    while assembled < result.rows.len() {
        let hi = (assembled + LOG_CHUNK_ROWS).min(result.rows.len());
        writeln!(
            log,
            "assemble: rows {assembled}..{hi} of {} (k {:.4} to {:.4})",
            result.rows.len(),
            result.rows[assembled].k,
            result.rows[hi - 1].k,
        )?;
        assembled = hi;
    }

    let peaks = find_peaks(&medium, &drive, &result.rows)?;
    for peak in &peaks {
        writeln!(
            log,
            "peak: {} at k = {:.5} rad/um, |G|^2 = {:.4e}",
            peak.condition, peak.position_k, peak.prob_max,
        )?;
    }

    Ok(SpectrumArtifacts {
        csv,
        peaks_json: peaks_report(&peaks, &result.warnings),
        resolved_toml: config.to_toml(),
        peaks,
        warnings: result.warnings.clone(),
        rows: result.rows.len(),
    })
}

/// Writes the three spectrum artifacts into `out_dir`, creating it if
/// needed; file names come from the config's outputs section.
///
/// # Errors
///
/// [`Error::Io`] on filesystem failures.
pub fn write_spectrum_files(
    config: &RunConfig,
    artifacts: &SpectrumArtifacts,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(&config.outputs.spectrum_csv);
    let json_path = out_dir.join(&config.outputs.peaks_json);
    let toml_path = out_dir.join("resolved.toml");
    fs::write(&csv_path, &artifacts.csv)?;
    fs::write(&json_path, &artifacts.peaks_json)?;
    fs::write(&toml_path, &artifacts.resolved_toml)?;
    Ok(vec![csv_path, json_path, toml_path])
}

/// Renders the spectrum as CSV, one row per (wavenumber, process, order)
/// with order in {first, second, total}. The total row holds |G|^2 of the
/// coherent sum; per-order rows hold the squared magnitude of that term
/// alone. `total_prob` repeats the row sum over processes.
pub fn spectrum_csv(result: &SpectrumResult) -> String {
    let mut out = String::from("k_um_inv,lambda_vac_um,process,order,prob,total_prob,labels\n");
    for row in &result.rows {
        for amp in &row.amplitudes {
            let labels = amp.labels.join(";");
            for (order, value) in [
                ("first", amp.order_split.0),
                ("second", amp.order_split.1),
                ("total", amp.value),
            ] {
                let _ = writeln!(
                    out,
                    "{:.16e},{:.16e},\"{}\",{},{:.16e},{:.16e},\"{}\"",
                    row.k,
                    row.lambda_vac,
                    amp.process,
                    order,
                    value.norm_sqr(),
                    row.total,
                    labels,
                );
            }
        }
    }
    out
}

fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

#[derive(Serialize)]
struct PeakReport<'a> {
    schema: u32,
    peaks: Vec<PeakOut>,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct PeakOut {
    position_k: f64,
    position_lambda: f64,
    condition: String,
    prob_max: f64,
    fwhm: f64,
}

/// Renders the peak report as pretty JSON with 6-significant-digit
/// numbers.
pub fn peaks_report(peaks: &[Peak], warnings: &[String]) -> String {
    let report = PeakReport {
        schema: crate::config::SCHEMA_VERSION,
        peaks: peaks
            .iter()
            .map(|p| PeakOut {
                position_k: sig6(p.position_k),
                position_lambda: sig6(p.position_lambda),
                condition: p.condition.clone(),
                prob_max: sig6(p.prob_max),
                fwhm: sig6(p.fwhm),
            })
            .collect(),
        warnings,
    };
    let mut body = serde_json::to_string_pretty(&report).expect("peak report serializes");
    body.push('\n');
    body
}

/// Renders the bulk branch table: one CSV row per (wavenumber, branch)
/// with the branch frequency and Hopfield weight.
///
/// # Errors
///
/// Propagates branch-solver failures with the offending wavenumber.
pub fn run_branches(config: &RunConfig) -> Result<String> {
    let medium = config.medium()?;
    let grid = config.k_grid();
    let modes = with_pool(config.run.threads, || {
        grid.iter()
            .map(|&k| branch_modes(&medium, k))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut out = String::from("k_um_inv,branch,omega_rad_um,hopfield_c\n");
    for m in &modes {
        for (branch, (&omega, &weight)) in m.omegas.iter().zip(&m.weights).enumerate() {
            let _ = writeln!(
                out,
                "{:.16e},{},{:.16e},{:.16e}",
                m.k, branch, omega, weight,
            );
        }
    }
    Ok(out)
}

/// Renders the fiber branch table over transverse orders up to the
/// configured (n, m): one CSV row per (wavenumber, branch, n, m). Branches
/// whose transverse shift is not perturbative at a wavenumber are skipped
/// and summarised in the returned warnings.
///
/// # Errors
///
/// Propagates medium and branch-solver failures other than the
/// non-perturbative case.
pub fn run_fiber(config: &RunConfig) -> Result<(String, Vec<String>)> {
    let fiber = config.fiber()?;
    let n_branches = fiber.medium().resonances().len() + 1;
    let (n_max, m_max) = fiber.mode_orders();
    let grid = config.k_grid();

    let mut out = String::from("k_um_inv,branch,n,m,omega_rad_um\n");
    let mut skipped = vec![0usize; n_branches * (n_max + 1) * (m_max + 1)];
    for &k in &grid {
        for branch in 0..n_branches {
            for n in 0..=n_max {
                for m in 0..=m_max {
                    match fiber.branch_frequency(k, branch, n, m) {
                        Ok(omega) => {
                            let _ = writeln!(
                                out,
                                "{:.16e},{},{},{},{:.16e}",
                                k, branch, n, m, omega,
                            );
                        }
                        Err(Error::BranchSolve { .. }) => {
                            skipped[(branch * (n_max + 1) + n) * (m_max + 1) + m] += 1;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    let mut warnings = Vec::new();
    for branch in 0..n_branches {
        for n in 0..=n_max {
            for m in 0..=m_max {
                let count = skipped[(branch * (n_max + 1) + n) * (m_max + 1) + m];
                if count > 0 {
                    warnings.push(format!(
                        "fiber: branch {branch} orders ({n}, {m}): no guided root at {count} of {} wavenumbers",
                        grid.len(),
                    ));
                }
            }
        }
    }
    Ok((out, warnings))
}

/// Residuals of the truncated propagator expansion per drive strength.
#[derive(Debug)]
pub struct OracleScaling {
    /// Drive strengths, ascending.
    pub eps: Vec<f64>,
    /// Sup-norm of exact minus (order 0 + 1 + 2) over the window.
    pub residual_sup: Vec<f64>,
    /// Fitted log-log slope; 3 when the truncation error is cubic.
    pub slope: f64,
}

/// Compares the exact driven-oscillator propagator against its expansion
/// through second order for each configured drive strength and fits the
/// residual scaling.
///
/// # Errors
///
/// [`Error::Config`] on a degenerate scenario; numeric errors from the
/// propagator solves.
pub fn oracle_scaling(section: &OracleSection) -> Result<OracleScaling> {
    let n = section.samples;
    let (t_i, t_f) = (section.t_min_um, section.t_max_um);
    let h = (t_f - t_i) / (n as f64 - 1.0);
    let grid: Vec<f64> = (0..n).map(|j| t_i + j as f64 * h).collect();
    let omega0 = section.omega0_rad_um;
    let w0 = omega0 * omega0;
    let sigma = section.envelope_sigma_um;
    let freq = section.drive_freq_rad_um;
    let f: Vec<f64> = grid
        .iter()
        .map(|&t| (freq * t).cos() * (-t * t / (2.0 * sigma * sigma)).exp())
        .collect();

    let mut eps = section.eps.clone();
    eps.sort_by(f64::total_cmp);
    let mut residual_sup = Vec::with_capacity(eps.len());
    for &e in &eps {
        let w: Vec<f64> = f.iter().map(|&fj| w0 * (1.0 + e * fj)).collect();
        let v: Vec<f64> = f.iter().map(|&fj| w0 * e * fj).collect();
        let exact = exact_green_oracle(&w, t_i, t_f, section.t_prime_um)?;
        let [d0, d1, d2] = born_series(omega0, &v, t_i, t_f, section.t_prime_um)?;
        let sup = (0..n)
            .map(|j| (exact[j] - d0[j] - d1[j] - d2[j]).abs())
            .fold(0.0, f64::max);
        residual_sup.push(sup);
    }
    let slope = log_log_slope(&eps, &residual_sup)?;
    Ok(OracleScaling {
        eps,
        residual_sup,
        slope,
    })
}

fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() < 2 || y.iter().any(|&v| v <= 0.0 || v.is_nan()) {
        return Err(Error::config(
            "scaling fit needs at least two strengths with non-zero residuals",
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(num / den)
}

/// Renders the oracle comparison as a text table with the fitted slope.
///
/// # Errors
///
/// As [`oracle_scaling`].
pub fn run_oracle(config: &RunConfig) -> Result<String> {
    let scaling = oracle_scaling(&config.oracle)?;
    let mut out = String::from("eps,sup_residual\n");
    for (e, r) in scaling.eps.iter().zip(&scaling.residual_sup) {
        let _ = writeln!(out, "{e:.16e},{r:.16e}");
    }
    let _ = writeln!(out, "# fitted log-log slope: {:.4}", scaling.slope);
    Ok(out)
}

/// Per-pulse angular pair density and repetition-scaled rate.
#[derive(Debug)]
pub struct RateReport {
    /// Vacuum wavelength the estimate was taken at (um).
    pub lambda_um: f64,
    /// Per-pulse dP/dtheta at the matched peak.
    pub per_pulse: f64,
    /// Pairs per second at the given repetition rate.
    pub per_second: f64,
}

/// Estimates the emitted pair rate at the peak nearest `lambda_mix_um`
/// for a spot of transverse scale `a_spot_um` and a pulsed drive at
/// `repetition_hz`.
///
/// # Errors
///
/// Propagates sweep errors.
pub fn estimate_rate(
    config: &RunConfig,
    a_spot_um: f64,
    lambda_mix_um: f64,
    repetition_hz: f64,
) -> Result<RateReport> {
    let medium = config.medium()?;
    let drive = config.modulation()?;
    let processes = config.processes();
    let opts = config.amplitude_options();
    let grid = config.k_grid();
    let result = with_pool(config.run.threads, || {
        spectrum(&medium, &drive, &grid, &processes, &opts)
    })?;
    let peaks = find_peaks(&medium, &drive, &result.rows)?;
    let per_pulse = emission_rate_per_angle(&peaks, a_spot_um, lambda_mix_um, drive.tau);
    let lambda_um = peaks
        .iter()
        .min_by(|a, b| {
            (a.position_lambda - lambda_mix_um)
                .abs()
                .total_cmp(&(b.position_lambda - lambda_mix_um).abs())
        })
        .map_or(lambda_mix_um, |p| p.position_lambda);
    Ok(RateReport {
        lambda_um,
        per_pulse,
        per_second: per_pulse * repetition_hz,
    })
}

/// Renders [`estimate_rate`] as text.
///
/// # Errors
///
/// As [`estimate_rate`].
pub fn run_rate(
    config: &RunConfig,
    a_spot_um: f64,
    lambda_mix_um: f64,
    repetition_hz: f64,
) -> Result<String> {
    let report = estimate_rate(config, a_spot_um, lambda_mix_um, repetition_hz)?;
    Ok(format!(
        "peak wavelength: {:.6} um\nper-pulse dP/dtheta: {:.6e}\npairs per second at {:.3e} Hz: {:.4}\n",
        report.lambda_um, report.per_pulse, repetition_hz, report.per_second,
    ))
}

/// Outcome of the per-mode state identities check.
#[derive(Debug)]
pub struct SelfTestReport {
    /// Rendered PASS/FAIL lines.
    pub text: String,
    /// True when every identity held.
    pub passed: bool,
}

/// Checks the per-mode state identities that do not need long quadrature:
/// two-index Hermite cross-recurrence on exact integer lattices, number
/// conservation of the transition matrix under a weak drive, and the
/// vacuum persistence consistency of the generating functional.
///
/// # Errors
///
/// Propagates construction errors; identity violations are reported in
/// the returned text, not as errors.
pub fn states_self_test() -> Result<SelfTestReport> {
    let mut text = String::new();
    let mut passed = true;
    let mut check = |label: &str, ok: bool, detail: String, text: &mut String| {
        let _ = writeln!(
            text,
            "{}: {label} ({detail})",
            if ok { "PASS" } else { "FAIL" }
        );
        passed &= ok;
    };

    // H_{m,n+1} = z H_mn - m H_{m-1,n} on a Gaussian-integer lattice is
    // exact in f64 for m, n <= 10.
    let y = Complex64::new(2.0, 1.0);
    let z = Complex64::new(1.0, -3.0);
    let mut worst = 0.0f64;
    for m in 0..=10usize {
        for n in 0..=10usize {
            let lhs = states::hermite_two(m, n + 1, y, z)?;
            let mut rhs = z * states::hermite_two(m, n, y, z)?;
            if m > 0 {
                rhs -= (m as f64) * states::hermite_two(m - 1, n, y, z)?;
            }
            worst = worst.max((lhs - rhs).norm());
        }
    }
    check(
        "hermite cross-recurrence m,n <= 10",
        worst == 0.0,
        format!("max deviation {worst:.2e}"),
        &mut text,
    );

    // A weak drive scatters the vacuum into number states with unit total
    // probability.
    let omega = 2.0;
    let d = states::DriveIntegrals::from_drive(omega, -6.0, 6.0, 4001, |t| {
        Complex64::new(0.02 * (1.3 * t).cos() * (-t * t / 8.0).exp(), 0.0)
    })?;
    let mut total = 0.0;
    for m in 0..=8 {
        for n in 0..=8 {
            total += states::transition_amplitude(&d, m, n, 0, 0)?.norm_sqr();
        }
    }
    check(
        "number conservation sum |G_mn<-00|^2 = 1",
        (total - 1.0).abs() < 1e-6,
        format!("deviation {:.2e}", (total - 1.0).abs()),
        &mut text,
    );

    // The generating functional at b = a = 0 is the vacuum persistence
    // amplitude, which is also G_00<-00.
    let f00 = states::generating_functional(&d, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let g00 = states::transition_amplitude(&d, 0, 0, 0, 0)?;
    let dev = (f00 - states::vacuum_persistence(&d)).norm() + (f00 - g00).norm();
    check(
        "generating functional vacuum consistency",
        dev < 1e-12,
        format!("deviation {dev:.2e}"),
        &mut text,
    );

    Ok(SelfTestReport { text, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_config;

    fn small_config() -> RunConfig {
        // A short sweep keeps runner tests fast while still crossing the
        // strongest resonance condition near k = 7.83.
        load_config(
            "[sweep]\nk_min_rad_um = 7.0\nk_max_rad_um = 9.0\npoints = 21\n",
        )
        .unwrap()
    }

    #[test]
    fn spectrum_artifacts_are_deterministic_across_thread_counts() {
        let mut one = small_config();
        one.run.threads = 1;
        let mut four = small_config();
        four.run.threads = 4;
        let mut sink = Vec::new();
        let a = run_spectrum(&one, &mut sink).unwrap();
        let b = run_spectrum(&four, &mut sink).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.peaks_json, b.peaks_json);
        assert!(a.rows >= 21);
    }

    #[test]
    fn spectrum_csv_shape_and_header() {
        let mut sink = Vec::new();
        let artifacts = run_spectrum(&small_config(), &mut sink).unwrap();
        let mut lines = artifacts.csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k_um_inv,lambda_vac_um,process,order,prob,total_prob,labels"
        );
        // One row per (k, process, order): 2 processes x 3 orders.
        assert_eq!(artifacts.csv.lines().count() - 1, artifacts.rows * 6);
        let first = lines.next().unwrap();
        assert!(first.contains("\"intra(1)\""), "{first}");
        let log = String::from_utf8(sink).unwrap();
        assert!(log.contains("spectrum: 21 input points"), "{log}");
        assert!(log.contains("assemble: rows 0.."), "{log}");
    }

    #[test]
    fn peak_report_rounds_to_six_digits() {
        let mut sink = Vec::new();
        let artifacts = run_spectrum(&small_config(), &mut sink).unwrap();
        assert!(!artifacts.peaks.is_empty());
        let parsed: serde_json::Value = serde_json::from_str(&artifacts.peaks_json).unwrap();
        assert_eq!(parsed["schema"], 1);
        let k = parsed["peaks"][0]["position_k"].as_f64().unwrap();
        assert_eq!(k, sig6(artifacts.peaks[0].position_k));
        assert_eq!(sig6(2.010890819e-4), 2.01089e-4);
    }

    #[test]
    fn spectrum_files_written_and_resolved_config_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config();
        let mut sink = Vec::new();
        let artifacts = run_spectrum(&config, &mut sink).unwrap();
        let paths = write_spectrum_files(&config, &artifacts, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let reloaded =
            load_config(&fs::read_to_string(dir.path().join("resolved.toml")).unwrap()).unwrap();
        assert_eq!(reloaded, config);
        assert_eq!(
            fs::read_to_string(&paths[0]).unwrap(),
            artifacts.csv
        );
    }

    #[test]
    fn zero_drive_spectrum_is_empty_of_peaks() {
        let mut config = small_config();
        config.modulation.eps = 0.0;
        let mut sink = Vec::new();
        let artifacts = run_spectrum(&config, &mut sink).unwrap();
        assert!(artifacts.peaks.is_empty());
        let parsed: serde_json::Value = serde_json::from_str(&artifacts.peaks_json).unwrap();
        assert_eq!(parsed["peaks"].as_array().unwrap().len(), 0);
        // The process column is quoted and may contain a comma, so index
        // fields from the line end.
        for line in artifacts.csv.lines().skip(1) {
            let prob: f64 = line.rsplit(',').nth(2).unwrap().parse().unwrap();
            assert_eq!(prob, 0.0);
        }
    }

    #[test]
    fn branch_table_covers_grid_and_branches() {
        let config = small_config();
        let table = run_branches(&config).unwrap();
        // 21 wavenumbers x 4 branches plus header.
        assert_eq!(table.lines().count(), 1 + 21 * 4);
        assert!(table.starts_with("k_um_inv,branch,omega_rad_um,hopfield_c\n"));
    }

    #[test]
    fn fiber_table_includes_orders_and_warns_on_expelled_branch() {
        let config = load_config(
            "[sweep]\nk_min_rad_um = 8.0\nk_max_rad_um = 12.0\npoints = 5\n[fiber]\ndelta_rad2_um4 = 0.01\nn = 1\nm = 0\n",
        )
        .unwrap();
        let (table, warnings) = run_fiber(&config).unwrap();
        assert!(table.starts_with("k_um_inv,branch,n,m,omega_rad_um\n"));
        // The matter-like branch has no guided root in this window.
        assert!(warnings.iter().any(|w| w.contains("branch 0")), "{warnings:?}");
        assert!(table.contains(",1,1,0,"), "{table}");
    }

    #[test]
    fn oracle_scaling_slope_is_cubic() {
        let mut config = load_config("[oracle]\nsamples = 4097\n").unwrap();
        config.oracle.eps = vec![1e-3, 3.1622776601683794e-3, 1e-2];
        let scaling = oracle_scaling(&config.oracle).unwrap();
        assert!(
            (scaling.slope - 3.0).abs() < 0.1,
            "slope {}",
            scaling.slope
        );
        let report = run_oracle(&config).unwrap();
        assert!(report.contains("fitted log-log slope"));
    }

    #[test]
    fn rate_report_scales_with_repetition_and_area() {
        // A window around the frequency-mixing condition near k = 14.44
        // keeps the sweep short; the rate estimator matches its peak.
        let config = load_config(
            "[sweep]\nk_min_rad_um = 13.9\nk_max_rad_um = 15.0\npoints = 12\n",
        )
        .unwrap();
        let base = estimate_rate(&config, 250.0, 0.65, 1e6).unwrap();
        assert!(base.per_second > 0.0);
        let silent = estimate_rate(&config, 250.0, 0.65, 0.0).unwrap();
        assert_eq!(silent.per_second, 0.0);
        let double = estimate_rate(&config, 500.0, 0.65, 1e6).unwrap();
        approx::assert_relative_eq!(
            double.per_pulse,
            2.0 * base.per_pulse,
            max_relative = 1e-12
        );
    }

    #[test]
    fn states_self_test_passes() {
        let report = states_self_test().unwrap();
        assert!(report.passed, "{}", report.text);
        assert_eq!(report.text.matches("PASS").count(), 3);
    }
}
