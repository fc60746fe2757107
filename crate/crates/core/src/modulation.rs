//! Two-tone Gaussian-windowed resonance modulation.
//!
//! One resonance of the medium is driven in time,
//!
//! Omega_m^2(t) = Omega_m^2 (1 + f(t)),
//! f(t) = eps (cos nu_1 t + cos nu_2 t) exp(-t^2 / 2 tau^2),
//!
//! with tone frequencies nu_1, nu_2 and window width tau, all in rad/um and
//! um. The drive spectrum (per unit volume, with the transform convention
//! f~(omega) = integral f(t) exp(i omega t) dt) is a sum of four Gaussians:
//!
//! f~(omega) = eps tau sqrt(pi/2) sum_{a in {+-nu_1, +-nu_2}}
//!             exp(-tau^2 (omega - nu_a)^2 / 2).
//!
//! The index perturbation amplitude per tone is
//! delta_eps(omega) = eps g_m^2 Omega_m^2 / (omega^2 - Omega_m^2)^2,
//! related to the peak refractive-index shift by |delta_n| =
//! delta_eps / (2 n).

use serde::{Deserialize, Serialize};

use crate::medium::{Medium, Resonance, POLE_TOLERANCE};
use crate::{Error, Result, UM_PER_FS};

/// Drive strength above which the perturbative expansion is suspect.
pub const EPS_WARN_THRESHOLD: f64 = 0.3;

/// Minimum tau * min(nu) for the tones to be spectrally resolved.
pub const TONE_RESOLUTION_WARN_THRESHOLD: f64 = 10.0;

/// A two-tone Gaussian-windowed modulation of one resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    /// Index of the modulated resonance (0-based, ascending frequency).
    pub resonance_index: usize,
    /// Dimensionless drive strength per tone.
    pub eps: f64,
    /// First tone frequency (rad/um).
    pub nu1: f64,
    /// Second tone frequency (rad/um).
    pub nu2: f64,
    /// Gaussian window width (um).
    pub tau: f64,
}

impl Modulation {
    /// Validates tone frequencies, window and strength.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on non-finite or non-positive parameters. The
    /// resonance index is checked against a medium at use time.
    pub fn new(resonance_index: usize, eps: f64, nu1: f64, nu2: f64, tau: f64) -> Result<Self> {
        if !eps.is_finite() {
            return Err(Error::config(format!("drive strength must be finite, got {eps}")));
        }
        for (name, v) in [("nu1", nu1), ("nu2", nu2), ("tau", tau)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Modulation {
            resonance_index,
            eps,
            nu1,
            nu2,
            tau,
        })
    }

    /// Reference scenario: drives the second resonance of `medium` at
    /// nu_1 = Omega_m / 5 and nu_2 = Omega_m / 6, with a 100 fs
    /// full-width-at-half-maximum intensity window and a drive strength
    /// giving a peak index shift of 1e-3 per tone at 0.65 um.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] if `medium` has fewer than two resonances.
    pub fn reference_for(medium: &Medium) -> Result<Self> {
        let resonance_index = 1;
        let omega_m = resonance(medium, resonance_index)?.omega;
        // 100 fs FWHM of the Gaussian window corresponds to
        // tau = FWHM / (2 sqrt(2 ln 2)).
        let tau_fs = 100.0 / (2.0 * (2.0 * 2.0_f64.ln()).sqrt());
        let tau = tau_fs * UM_PER_FS;
        let eps = eps_for_delta_n(medium, resonance_index, 1e-3, 0.65)?;
        Modulation::new(resonance_index, eps, omega_m / 5.0, omega_m / 6.0, tau)
    }

    /// Drive waveform f(t), t in um.
    pub fn waveform(&self, t: f64) -> f64 {
        self.eps
            * ((self.nu1 * t).cos() + (self.nu2 * t).cos())
            * (-t * t / (2.0 * self.tau * self.tau)).exp()
    }

    /// Drive spectrum f~(omega) per unit volume (four-Gaussian closed form).
    pub fn spectrum(&self, omega: f64) -> f64 {
        let prefactor = self.eps * self.tau * (std::f64::consts::PI / 2.0).sqrt();
        let mut sum = 0.0;
        for nu_a in self.tones() {
            let d = omega - nu_a;
            sum += (-0.5 * self.tau * self.tau * d * d).exp();
        }
        prefactor * sum
    }

    /// The four spectral tone centres +-nu_1, +-nu_2.
    pub fn tones(&self) -> [f64; 4] {
        [self.nu1, -self.nu1, self.nu2, -self.nu2]
    }

    /// The modulated resonance of `medium`.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] if the index is out of range.
    pub fn resonance<'m>(&self, medium: &'m Medium) -> Result<&'m Resonance> {
        resonance(medium, self.resonance_index)
    }

    /// Index perturbation amplitude per tone,
    /// delta_eps(omega) = eps g_m^2 Omega_m^2 / (omega^2 - Omega_m^2)^2.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on a bad resonance index,
    /// [`Error::PoleAtResonance`] within the pole guard of Omega_m.
    pub fn delta_eps(&self, medium: &Medium, omega: f64) -> Result<f64> {
        let r = self.resonance(medium)?;
        if (omega.abs() - r.omega).abs() < POLE_TOLERANCE {
            return Err(Error::PoleAtResonance {
                omega,
                omega_res: r.omega,
                tolerance: POLE_TOLERANCE,
            });
        }
        let detune = omega * omega - r.omega * r.omega;
        Ok(self.eps * r.g * r.g * r.omega * r.omega / (detune * detune))
    }

    /// Validity warnings: strong drive (eps above
    /// [`EPS_WARN_THRESHOLD`]) and spectrally unresolved tones
    /// (tau * min(nu) below [`TONE_RESOLUTION_WARN_THRESHOLD`]). Neither is
    /// an error; results degrade gracefully.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.eps.abs() > EPS_WARN_THRESHOLD {
            out.push(format!(
                "drive strength eps = {} exceeds {}; perturbative amplitudes unreliable",
                self.eps, EPS_WARN_THRESHOLD
            ));
        }
        let resolution = self.tau * self.nu1.min(self.nu2);
        if resolution < TONE_RESOLUTION_WARN_THRESHOLD {
            out.push(format!(
                "tau * min(nu) = {resolution:.3} < {TONE_RESOLUTION_WARN_THRESHOLD}; \
                 tones not resolved within the window"
            ));
        }
        out
    }
}

fn resonance(medium: &Medium, index: usize) -> Result<&Resonance> {
    medium.resonances().get(index).ok_or_else(|| {
        Error::config(format!(
            "modulated resonance index {index} out of range for {} resonances",
            medium.resonances().len()
        ))
    })
}

/// Drive strength that yields a peak index shift `delta_n` per tone at
/// vacuum wavelength `lambda_um`:
/// eps = 2 delta_n n(omega_0) (omega_0^2 - Omega_m^2)^2 / (g_m^2 Omega_m^2).
///
/// # Errors
///
/// [`Error::Config`] on a bad index or non-positive inputs; index errors as
/// [`Medium::refractive_index`] at the probe frequency.
pub fn eps_for_delta_n(
    medium: &Medium,
    resonance_index: usize,
    delta_n: f64,
    lambda_um: f64,
) -> Result<f64> {
    if !(delta_n.is_finite() && delta_n > 0.0 && lambda_um.is_finite() && lambda_um > 0.0) {
        return Err(Error::config(format!(
            "delta_n and wavelength must be positive, got {delta_n}, {lambda_um}"
        )));
    }
    let r = resonance(medium, resonance_index)?;
    let omega0 = 2.0 * std::f64::consts::PI / lambda_um;
    let n = medium.refractive_index(omega0)?;
    let detune = omega0 * omega0 - r.omega * r.omega;
    Ok(2.0 * delta_n * n * detune * detune / (r.g * r.g * r.omega * r.omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::simpson;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn reference_scenario_frozen_values() {
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        assert_eq!(md.resonance_index, 1);
        assert_relative_eq!(md.nu1, 10.810_580_92, max_relative = 1e-9);
        assert_relative_eq!(md.nu2, 9.008_817_44, max_relative = 1e-9);
        assert_relative_eq!(md.tau, 12.731_013_51, max_relative = 1e-9);
        assert_relative_eq!(md.eps, 6.691_437_473_4e-3, max_relative = 1e-9);
        assert!(md.warnings().is_empty());
    }

    #[test]
    fn eps_inversion_round_trips_delta_n() {
        // delta_eps / (2 n) at the probe wavelength must give back delta_n.
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        let omega0 = 2.0 * std::f64::consts::PI / 0.65;
        let n = m.refractive_index(omega0).unwrap();
        let delta_n = md.delta_eps(&m, omega0).unwrap() / (2.0 * n);
        assert_relative_eq!(delta_n, 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn delta_eps_matches_index_perturbation() {
        // Scaling Omega_m^2 by (1 + s) changes n^2 by -s g_m^2 Omega_m^2 /
        // (omega^2 - Omega_m^2)^2 to first order; delta_eps is eps times
        // that magnitude.
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        let omega = 5.405_290_46;
        let s: f64 = 1e-7;
        let r = m.resonances()[1];
        let scaled = Medium::new(
            m.resonances()
                .iter()
                .enumerate()
                .map(|(i, res)| {
                    if i == 1 {
                        Resonance {
                            omega: res.omega * (1.0 + s).sqrt(),
                            g: res.g,
                        }
                    } else {
                        *res
                    }
                })
                .collect(),
        )
        .unwrap();
        let fd = (scaled.n_squared(omega).unwrap() - m.n_squared(omega).unwrap()) / s;
        let expected = -r.g * r.g * r.omega * r.omega
            / ((omega * omega - r.omega * r.omega).powi(2));
        assert_relative_eq!(fd, expected, max_relative = 1e-5);
        assert_relative_eq!(
            md.delta_eps(&m, omega).unwrap(),
            md.eps * expected.abs(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn delta_eps_frozen_at_half_nu1() {
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        let de = md.delta_eps(&m, 5.405_290_46).unwrap();
        assert_relative_eq!(de, 2.785_1e-3, max_relative = 1e-4);
    }

    #[test]
    fn spectrum_matches_direct_transform() {
        // Closed form against a direct numerical Fourier transform of the
        // waveform.
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        let half_span = 8.0 * md.tau;
        let n = 32_769;
        let h = 2.0 * half_span / (n as f64 - 1.0);
        for &omega in &[md.nu1, md.nu2, md.nu1 + 2.0 / md.tau, 9.5, 0.3, -md.nu2] {
            let vals: Vec<Complex64> = (0..n)
                .map(|i| {
                    let t = -half_span + i as f64 * h;
                    Complex64::new(0.0, omega * t).exp() * md.waveform(t)
                })
                .collect();
            let direct = simpson(&vals, h);
            assert_relative_eq!(direct.re, md.spectrum(omega), max_relative = 1e-8);
            assert!(direct.im.abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_even() {
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        assert_eq!(md.spectrum(9.3), md.spectrum(-9.3));
    }

    #[test]
    fn warnings_flag_strong_and_unresolved_drives() {
        let strong = Modulation::new(0, 0.5, 10.0, 9.0, 12.0).unwrap();
        assert_eq!(strong.warnings().len(), 1);
        assert!(strong.warnings()[0].contains("eps"));

        let unresolved = Modulation::new(0, 0.01, 1.0, 0.5, 3.0).unwrap();
        assert_eq!(unresolved.warnings().len(), 1);
        assert!(unresolved.warnings()[0].contains("tau"));
    }

    #[test]
    fn constructor_and_index_validation() {
        assert!(Modulation::new(0, 0.01, -1.0, 1.0, 1.0).is_err());
        assert!(Modulation::new(0, f64::NAN, 1.0, 1.0, 1.0).is_err());
        let m = Medium::fused_silica();
        let md = Modulation::new(7, 0.01, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(md.delta_eps(&m, 2.0), Err(Error::Config { .. })));
    }

    #[test]
    fn delta_eps_pole_guard() {
        let m = Medium::fused_silica();
        let md = Modulation::reference_for(&m).unwrap();
        let at_pole = m.resonances()[1].omega + 1e-10;
        assert!(matches!(
            md.delta_eps(&m, at_pole),
            Err(Error::PoleAtResonance { .. })
        ));
    }
}
