//! Run configuration: TOML schema, defaults, validation.
//!
//! Users write a sparse TOML file; loading applies defaults and resolves
//! it into a fully concrete [`RunConfig`] in which every field holds a
//! number. The resolved config serializes back to TOML and reloads to an
//! identical value, so a run can be archived and replayed exactly.
//!
//! Defaults reproduce the reference scenario: fused-silica medium, drive
//! on resonance 1 at nu1 = Omega_m / 5 and nu2 = Omega_m / 6, a 100 fs
//! FWHM window, drive strength set by a 1e-3 index shift at 0.65 um, and
//! a wavenumber sweep over the optical window. All indices are 0-based,
//! including resonance and branch indices in the TOML.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::amplitudes::{AmplitudeOptions, MixingMode, Process};
use crate::fiber::Fiber;
use crate::medium::{Medium, Resonance};
use crate::modulation::{eps_for_delta_n, Modulation};
use crate::{Error, Result, UM_PER_FS};

/// Supported config schema version.
pub const SCHEMA_VERSION: u32 = 1;

fn config_err<T>(message: impl Into<String>) -> Result<T> {
    Err(Error::config(message))
}

// ---------------------------------------------------------------------
// Raw schema: what users write. Every field is optional; unknown keys are
// rejected with the serde field listing as the suggestion.
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: Option<u32>,
    medium: Option<RawMedium>,
    modulation: Option<RawModulation>,
    sweep: Option<RawSweep>,
    processes: Option<RawProcesses>,
    outputs: Option<RawOutputs>,
    run: Option<RawRun>,
    fiber: Option<RawFiber>,
    oracle: Option<RawOracle>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    preset: Option<String>,
    resonances: Option<Vec<ResonanceEntry>>,
    sellmeier: Option<Vec<SellmeierEntry>>,
}

/// One Sellmeier term B lambda^2 / (lambda^2 - lambda_i^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierEntry {
    /// Dimensionless strength B_i.
    pub b: f64,
    /// Resonance wavelength (um).
    pub lambda_um: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModulation {
    resonance_index: Option<usize>,
    eps: Option<f64>,
    delta_n: Option<f64>,
    delta_n_lambda_um: Option<f64>,
    nu1_rad_um: Option<f64>,
    nu2_rad_um: Option<f64>,
    tau_fs: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    k_min_rad_um: Option<f64>,
    k_max_rad_um: Option<f64>,
    lambda_min_um: Option<f64>,
    lambda_max_um: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcesses {
    intra: Option<Vec<usize>>,
    inter: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    spectrum_csv: Option<String>,
    peaks_json: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    mixing_mode: Option<String>,
    include_subleading: Option<bool>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    delta_rad2_um4: Option<f64>,
    n: Option<usize>,
    m: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    omega0_rad_um: Option<f64>,
    drive_freq_rad_um: Option<f64>,
    envelope_sigma_um: Option<f64>,
    t_min_um: Option<f64>,
    t_max_um: Option<f64>,
    samples: Option<usize>,
    t_prime_um: Option<f64>,
    eps: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------
// Resolved schema: every field concrete. Serializes back to TOML.
// ---------------------------------------------------------------------

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Schema version, fixed at [`SCHEMA_VERSION`].
    pub schema: u32,
    /// Medium resonances.
    pub medium: MediumSection,
    /// Drive parameters.
    pub modulation: ModulationSection,
    /// Wavenumber sweep.
    pub sweep: SweepSection,
    /// Pair channels to evaluate.
    pub processes: ProcessesSection,
    /// Output file names.
    pub outputs: OutputsSection,
    /// Evaluation options.
    pub run: RunSection,
    /// Fiber-profile parameters for the fiber sweep.
    pub fiber: FiberSection,
    /// Perturbation-oracle scenario for the convergence run.
    pub oracle: OracleSection,
}

/// Resolved medium: a concrete resonance list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    /// Resonances ascending in frequency.
    pub resonances: Vec<ResonanceEntry>,
}

/// One medium resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceEntry {
    /// Resonance frequency (rad / um).
    pub omega_rad_um: f64,
    /// Coupling strength (rad / um).
    pub g_rad_um: f64,
}

/// Resolved drive parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    /// Index of the driven resonance (0-based, ascending).
    pub resonance_index: usize,
    /// Fractional resonance modulation depth per tone.
    pub eps: f64,
    /// First tone frequency (rad / um).
    pub nu1_rad_um: f64,
    /// Second tone frequency (rad / um).
    pub nu2_rad_um: f64,
    /// Gaussian window width tau (fs).
    pub tau_fs: f64,
}

/// Resolved wavenumber sweep (a lambda range is converted on load).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Lowest wavenumber (rad / um).
    pub k_min_rad_um: f64,
    /// Highest wavenumber (rad / um).
    pub k_max_rad_um: f64,
    /// Uniform grid size including both ends.
    pub points: usize,
}

/// Pair channels, by 0-based branch index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessesSection {
    /// Same-branch channels.
    pub intra: Vec<usize>,
    /// Distinct-branch channels.
    pub inter: Vec<[usize; 2]>,
}

/// Output file names, resolved against the output directory at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    /// Spectrum CSV file name.
    pub spectrum_csv: String,
    /// Peak report JSON file name.
    pub peaks_json: String,
}

/// Evaluation options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Mixing-integral route: "analytic" or "quadrature".
    pub mixing_mode: String,
    /// Include the subleading interbranch correction.
    pub include_subleading: bool,
    /// Worker threads for the sweep; 0 keeps the pool default.
    pub threads: usize,
}

/// Fiber-profile parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    /// Profile curvature Delta (rad^2 um^-4).
    pub delta_rad2_um4: f64,
    /// Highest transverse order in x swept by the fiber run.
    pub n: usize,
    /// Highest transverse order in y swept by the fiber run.
    pub m: usize,
}

/// Scenario for the propagator convergence run: a single-tone drive
/// f(t) = cos(freq t) e^(-t^2 / (2 sigma^2)) on a constant carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// Carrier frequency Omega_0 (rad / um).
    pub omega0_rad_um: f64,
    /// Drive tone frequency (rad / um).
    pub drive_freq_rad_um: f64,
    /// Drive envelope width (um).
    pub envelope_sigma_um: f64,
    /// Window start (um).
    pub t_min_um: f64,
    /// Window end (um).
    pub t_max_um: f64,
    /// Time samples across the window.
    pub samples: usize,
    /// Fixed second propagator argument (um).
    pub t_prime_um: f64,
    /// Drive strengths for the convergence fit.
    pub eps: Vec<f64>,
}

// ---------------------------------------------------------------------
// Loading and resolution
// ---------------------------------------------------------------------

/// Parses and resolves a config from TOML text; an empty string yields the
/// full reference-scenario default.
///
/// # Errors
///
/// [`Error::Config`] with the offending field path and reason.
pub fn load_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<RunConfig> {
    if let Some(schema) = raw.schema {
        if schema != SCHEMA_VERSION {
            return config_err(format!(
                "schema version {schema} unsupported; this build reads schema = {SCHEMA_VERSION}"
            ));
        }
    }
    let medium_section = resolve_medium(raw.medium.unwrap_or_default())?;
    let medium = build_medium(&medium_section)?;
    let modulation = resolve_modulation(raw.modulation.unwrap_or_default(), &medium)?;
    let sweep = resolve_sweep(raw.sweep.unwrap_or_default(), &medium)?;
    let processes = resolve_processes(raw.processes.unwrap_or_default(), &medium)?;
    let outputs = raw.outputs.unwrap_or_default();
    let run = resolve_run(raw.run.unwrap_or_default())?;
    let fiber = resolve_fiber(raw.fiber.unwrap_or_default())?;
    let oracle = resolve_oracle(raw.oracle.unwrap_or_default())?;
    Ok(RunConfig {
        schema: SCHEMA_VERSION,
        medium: medium_section,
        modulation,
        sweep,
        processes,
        outputs: OutputsSection {
            spectrum_csv: outputs
                .spectrum_csv
                .unwrap_or_else(|| "spectrum.csv".to_string()),
            peaks_json: outputs
                .peaks_json
                .unwrap_or_else(|| "peaks.json".to_string()),
        },
        run,
        fiber,
        oracle,
    })
}

fn resolve_medium(raw: RawMedium) -> Result<MediumSection> {
    let given = usize::from(raw.preset.is_some())
        + usize::from(raw.resonances.is_some())
        + usize::from(raw.sellmeier.is_some());
    if given > 1 {
        return config_err("medium: preset, resonances and sellmeier are mutually exclusive");
    }
    let medium = if let Some(terms) = raw.sellmeier {
        if terms.is_empty() {
            return config_err("medium.sellmeier must not be empty");
        }
        let pairs: Vec<(f64, f64)> = terms.iter().map(|t| (t.b, t.lambda_um)).collect();
        Medium::from_sellmeier(&pairs)?
    } else if let Some(entries) = raw.resonances {
        if entries.is_empty() {
            return config_err("medium.resonances must not be empty");
        }
        Medium::new(
            entries
                .iter()
                .map(|e| Resonance {
                    omega: e.omega_rad_um,
                    g: e.g_rad_um,
                })
                .collect(),
        )?
    } else {
        match raw.preset.as_deref() {
            None | Some("fused-silica") => Medium::fused_silica(),
            Some(other) => {
                return config_err(format!(
                    "medium.preset \"{other}\" unknown; available: \"fused-silica\""
                ))
            }
        }
    };
    Ok(MediumSection {
        resonances: medium
            .resonances()
            .iter()
            .map(|r| ResonanceEntry {
                omega_rad_um: r.omega,
                g_rad_um: r.g,
            })
            .collect(),
    })
}

fn build_medium(section: &MediumSection) -> Result<Medium> {
    Medium::new(
        section
            .resonances
            .iter()
            .map(|e| Resonance {
                omega: e.omega_rad_um,
                g: e.g_rad_um,
            })
            .collect(),
    )
}

fn resolve_modulation(raw: RawModulation, medium: &Medium) -> Result<ModulationSection> {
    let resonance_index = raw.resonance_index.unwrap_or(1);
    let n_res = medium.resonances().len();
    if resonance_index >= n_res {
        return config_err(format!(
            "modulation.resonance_index {resonance_index} out of range for {n_res} resonances"
        ));
    }
    let omega_m = medium.resonances()[resonance_index].omega;

    let tau_fs = raw
        .tau_fs
        .unwrap_or_else(|| 100.0 / (2.0 * (2.0 * 2.0_f64.ln()).sqrt()));
    if !(tau_fs.is_finite() && tau_fs > 0.0) {
        return config_err("modulation.tau_fs must be > 0");
    }

    if raw.eps.is_some() && (raw.delta_n.is_some() || raw.delta_n_lambda_um.is_some()) {
        return config_err("modulation: eps and delta_n are mutually exclusive");
    }
    if raw.delta_n.is_some() != raw.delta_n_lambda_um.is_some() {
        return config_err("modulation: delta_n and delta_n_lambda_um must be given together");
    }
    let eps = if let Some(eps) = raw.eps {
        eps
    } else {
        let delta_n = raw.delta_n.unwrap_or(1e-3);
        let lambda = raw.delta_n_lambda_um.unwrap_or(0.65);
        eps_for_delta_n(medium, resonance_index, delta_n, lambda)?
    };

    let nu1 = raw.nu1_rad_um.unwrap_or(omega_m / 5.0);
    let nu2 = raw.nu2_rad_um.unwrap_or(omega_m / 6.0);
    for (name, v) in [("nu1_rad_um", nu1), ("nu2_rad_um", nu2)] {
        if !(v.is_finite() && v > 0.0) {
            return config_err(format!("modulation.{name} must be > 0, got {v}"));
        }
    }
    Ok(ModulationSection {
        resonance_index,
        eps,
        nu1_rad_um: nu1,
        nu2_rad_um: nu2,
        tau_fs,
    })
}

fn resolve_sweep(raw: RawSweep, medium: &Medium) -> Result<SweepSection> {
    let has_k = raw.k_min_rad_um.is_some() || raw.k_max_rad_um.is_some();
    let has_lambda = raw.lambda_min_um.is_some() || raw.lambda_max_um.is_some();
    if has_k && has_lambda {
        return config_err("sweep: k and lambda ranges are mutually exclusive");
    }
    let (k_min, k_max) = if has_lambda {
        let (Some(l_min), Some(l_max)) = (raw.lambda_min_um, raw.lambda_max_um) else {
            return config_err("sweep: lambda_min_um and lambda_max_um must be given together");
        };
        if !(l_min.is_finite() && l_min > 0.0 && l_max.is_finite() && l_max > l_min) {
            return config_err("sweep: lambda range must satisfy 0 < lambda_min_um < lambda_max_um");
        }
        // Vacuum wavelength maps to the on-shell wavenumber k = omega n(omega);
        // a shorter wavelength bounds the sweep from above.
        (k_on_shell(medium, l_max)?, k_on_shell(medium, l_min)?)
    } else {
        let k_min = raw.k_min_rad_um.unwrap_or(6.0);
        let k_max = raw.k_max_rad_um.unwrap_or(17.0);
        (k_min, k_max)
    };
    if !(k_min.is_finite() && k_min > 0.0 && k_max.is_finite() && k_max > k_min) {
        return config_err("sweep: range must satisfy 0 < k_min_rad_um < k_max_rad_um");
    }
    let points = raw.points.unwrap_or(221);
    if points < 2 {
        return config_err("sweep.points must be at least 2");
    }
    Ok(SweepSection {
        k_min_rad_um: k_min,
        k_max_rad_um: k_max,
        points,
    })
}

fn k_on_shell(medium: &Medium, lambda_um: f64) -> Result<f64> {
    let omega = 2.0 * PI / lambda_um;
    let n = medium.refractive_index(omega).map_err(|e| {
        Error::config(format!(
            "sweep: lambda {lambda_um} um is not propagating: {e}"
        ))
    })?;
    Ok(omega * n)
}

fn resolve_processes(raw: RawProcesses, medium: &Medium) -> Result<ProcessesSection> {
    let n_branches = medium.resonances().len() + 1;
    let intra = raw.intra.unwrap_or_else(|| vec![1]);
    let inter = raw.inter.unwrap_or_else(|| vec![[1, 0]]);
    if intra.is_empty() && inter.is_empty() {
        return config_err("processes must name at least one channel");
    }
    for (i, &alpha) in intra.iter().enumerate() {
        if alpha >= n_branches {
            return config_err(format!(
                "processes.intra[{i}]: branch index {alpha} out of range for {n_branches} branches"
            ));
        }
    }
    for (i, pair) in inter.iter().enumerate() {
        if pair[0] == pair[1] {
            return config_err(format!(
                "processes.inter[{i}]: branch indices must be distinct"
            ));
        }
        for &alpha in pair {
            if alpha >= n_branches {
                return config_err(format!(
                    "processes.inter[{i}]: branch index {alpha} out of range for {n_branches} branches"
                ));
            }
        }
    }
    Ok(ProcessesSection { intra, inter })
}

fn resolve_run(raw: RawRun) -> Result<RunSection> {
    let mixing_mode = raw.mixing_mode.unwrap_or_else(|| "analytic".to_string());
    if parse_mixing_mode(&mixing_mode).is_none() {
        return config_err(format!(
            "run.mixing_mode \"{mixing_mode}\" unknown; expected \"analytic\" or \"quadrature\""
        ));
    }
    Ok(RunSection {
        mixing_mode,
        include_subleading: raw.include_subleading.unwrap_or(false),
        threads: raw.threads.unwrap_or(0),
    })
}

fn parse_mixing_mode(s: &str) -> Option<MixingMode> {
    match s {
        "analytic" => Some(MixingMode::Analytic),
        "quadrature" => Some(MixingMode::Quadrature),
        _ => None,
    }
}

fn resolve_fiber(raw: RawFiber) -> Result<FiberSection> {
    let delta = raw.delta_rad2_um4.unwrap_or(1e-4);
    if !delta.is_finite() || delta < 0.0 {
        return config_err("fiber.delta_rad2_um4 must be finite and >= 0");
    }
    Ok(FiberSection {
        delta_rad2_um4: delta,
        n: raw.n.unwrap_or(0),
        m: raw.m.unwrap_or(0),
    })
}

fn resolve_oracle(raw: RawOracle) -> Result<OracleSection> {
    let section = OracleSection {
        omega0_rad_um: raw.omega0_rad_um.unwrap_or(2.0),
        drive_freq_rad_um: raw.drive_freq_rad_um.unwrap_or(1.3),
        envelope_sigma_um: raw.envelope_sigma_um.unwrap_or(3.0),
        t_min_um: raw.t_min_um.unwrap_or(-15.1),
        t_max_um: raw.t_max_um.unwrap_or(15.1),
        samples: raw.samples.unwrap_or(8193),
        t_prime_um: raw.t_prime_um.unwrap_or(0.0),
        eps: raw.eps.unwrap_or_else(|| {
            (0..5).map(|j| 10f64.powf(-4.0 + 0.5 * j as f64)).collect()
        }),
    };
    if !(section.omega0_rad_um.is_finite() && section.omega0_rad_um > 0.0) {
        return config_err("oracle.omega0_rad_um must be > 0");
    }
    if section.t_max_um <= section.t_min_um {
        return config_err("oracle: window must satisfy t_min_um < t_max_um");
    }
    if section.samples < 3 {
        return config_err("oracle.samples must be at least 3");
    }
    if section.eps.is_empty() || section.eps.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
        return config_err("oracle.eps must be a non-empty list of positive strengths");
    }
    Ok(section)
}

// ---------------------------------------------------------------------
// Accessors building domain values
// ---------------------------------------------------------------------

impl RunConfig {
    /// Builds the medium.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on an invalid resonance list.
    pub fn medium(&self) -> Result<Medium> {
        build_medium(&self.medium)
    }

    /// Builds the drive for `medium`.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on invalid drive parameters.
    pub fn modulation(&self) -> Result<Modulation> {
        Modulation::new(
            self.modulation.resonance_index,
            self.modulation.eps,
            self.modulation.nu1_rad_um,
            self.modulation.nu2_rad_um,
            self.modulation.tau_fs * UM_PER_FS,
        )
    }

    /// Requested channels, intrabranch first, in config order.
    pub fn processes(&self) -> Vec<Process> {
        let mut out: Vec<Process> = self
            .processes
            .intra
            .iter()
            .map(|&alpha| Process::Intra { alpha })
            .collect();
        out.extend(self.processes.inter.iter().map(|p| Process::Inter {
            alpha: p[0],
            alpha_p: p[1],
        }));
        out
    }

    /// Uniform input sweep grid, both ends included.
    pub fn k_grid(&self) -> Vec<f64> {
        let n = self.sweep.points;
        let lo = self.sweep.k_min_rad_um;
        let hi = self.sweep.k_max_rad_um;
        (0..n)
            .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
            .collect()
    }

    /// Amplitude evaluation options from the run section.
    pub fn amplitude_options(&self) -> AmplitudeOptions {
        AmplitudeOptions {
            mixing_mode: parse_mixing_mode(&self.run.mixing_mode)
                .expect("mixing_mode validated on load"),
            include_subleading: self.run.include_subleading,
        }
    }

    /// Builds the fiber for the fiber sweep.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on invalid medium or profile parameters.
    pub fn fiber(&self) -> Result<Fiber> {
        Fiber::new(
            self.medium()?,
            self.fiber.delta_rad2_um4,
            self.fiber.n,
            self.fiber.m,
        )
    }

    /// Serializes the resolved config; reloading the text reproduces
    /// `self` exactly.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("resolved config serializes")
    }
}
