//! Dispersive medium model.
//!
//! The medium couples light to a set of polarisation resonances, giving the
//! squared refractive index
//!
//! n^2(omega) = 1 - sum_i g_i^2 / (omega^2 - Omega_i^2),
//!
//! with resonance frequencies Omega_i and coupling rates g_i, both in
//! rad/um. Sellmeier coefficients (B_i, lambda_i) map to this form through
//! Omega_i = 2 pi / lambda_i and g_i^2 = B_i Omega_i^2; with that sign
//! convention n^2 > 1 below the first ultraviolet resonance.
//!
//! Plane-wave normal modes satisfy D(k, omega) = 0 with the dispersion
//! function D(k, omega) = -k^2 + omega^2 n^2(omega).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute guard width around each resonance frequency (rad/um).
pub const POLE_TOLERANCE: f64 = 1e-9;

/// Fused silica Sellmeier coefficients (B_i, lambda_i in um).
pub const FUSED_SILICA_SELLMEIER: [(f64, f64); 3] = [
    (0.696_166_3, 0.068_404_3),
    (0.407_942_6, 0.116_241_4),
    (0.897_479_4, 9.896_161),
];

/// One polarisation resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// Resonance frequency Omega_i (rad/um), positive.
    pub omega: f64,
    /// Coupling rate g_i (rad/um), non-negative.
    pub g: f64,
}

/// A transparent medium with Lorentzian polarisation resonances, sorted by
/// ascending resonance frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    resonances: Vec<Resonance>,
}

impl Medium {
    /// Builds a medium from resonances, which must be finite, strictly
    /// ascending in frequency, positive in frequency and non-negative in
    /// coupling.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on an empty list or invalid entries.
    pub fn new(resonances: Vec<Resonance>) -> Result<Self> {
        if resonances.is_empty() {
            return Err(Error::config("medium needs at least one resonance"));
        }
        for r in &resonances {
            if !(r.omega.is_finite() && r.omega > 0.0) {
                return Err(Error::config(format!(
                    "resonance frequency must be finite and positive, got {}",
                    r.omega
                )));
            }
            if !(r.g.is_finite() && r.g >= 0.0) {
                return Err(Error::config(format!(
                    "coupling must be finite and non-negative, got {}",
                    r.g
                )));
            }
        }
        if resonances.windows(2).any(|w| w[0].omega >= w[1].omega) {
            return Err(Error::config(
                "resonance frequencies must be strictly ascending",
            ));
        }
        Ok(Medium { resonances })
    }

    /// Builds a medium from Sellmeier pairs (B_i, lambda_i in um), sorting
    /// resonances into ascending frequency.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on non-positive wavelengths, negative B, or
    /// coincident resonance frequencies.
    pub fn from_sellmeier(terms: &[(f64, f64)]) -> Result<Self> {
        let mut resonances: Vec<Resonance> = terms
            .iter()
            .map(|&(b, lambda)| {
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(Error::config(format!(
                        "Sellmeier wavelength must be positive, got {lambda}"
                    )));
                }
                if !(b.is_finite() && b >= 0.0) {
                    return Err(Error::config(format!(
                        "Sellmeier coefficient must be non-negative, got {b}"
                    )));
                }
                let omega = 2.0 * std::f64::consts::PI / lambda;
                Ok(Resonance {
                    omega,
                    g: b.sqrt() * omega,
                })
            })
            .collect::<Result<_>>()?;
        resonances.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        Medium::new(resonances)
    }

    /// Fused silica in the Sellmeier parametrisation.
    pub fn fused_silica() -> Self {
        Medium::from_sellmeier(&FUSED_SILICA_SELLMEIER)
            .expect("built-in Sellmeier data is valid")
    }

    /// Resonances in ascending frequency order.
    pub fn resonances(&self) -> &[Resonance] {
        &self.resonances
    }

    /// Squared refractive index n^2(omega). May be negative between a
    /// resonance and the adjacent zero of n^2 (evanescent gap); callers that
    /// need a propagating index use [`Medium::refractive_index`].
    ///
    /// # Errors
    ///
    /// [`Error::PoleAtResonance`] within [`POLE_TOLERANCE`] of a resonance.
    pub fn n_squared(&self, omega: f64) -> Result<f64> {
        let w = omega.abs();
        let mut sum = 0.0;
        for r in &self.resonances {
            if (w - r.omega).abs() < POLE_TOLERANCE {
                return Err(Error::PoleAtResonance {
                    omega,
                    omega_res: r.omega,
                    tolerance: POLE_TOLERANCE,
                });
            }
            sum += r.g * r.g / (omega * omega - r.omega * r.omega);
        }
        Ok(1.0 - sum)
    }

    /// Refractive index n(omega) = sqrt(n^2) where the mode propagates.
    ///
    /// # Errors
    ///
    /// [`Error::PoleAtResonance`] near a resonance,
    /// [`Error::EvanescentGap`] where n^2 < 0.
    pub fn refractive_index(&self, omega: f64) -> Result<f64> {
        let n_squared = self.n_squared(omega)?;
        if n_squared < 0.0 {
            return Err(Error::EvanescentGap { omega, n_squared });
        }
        Ok(n_squared.sqrt())
    }

    /// Dispersion function D(k, omega) = -k^2 + omega^2 n^2(omega); zero on
    /// a normal mode.
    ///
    /// # Errors
    ///
    /// [`Error::PoleAtResonance`] near a resonance.
    pub fn dispersion_d(&self, k: f64, omega: f64) -> Result<f64> {
        Ok(-k * k + omega * omega * self.n_squared(omega)?)
    }

    /// Group index n_g = d(omega n)/d omega
    /// = n + (omega^2 / n) sum_i g_i^2 / (omega^2 - Omega_i^2)^2.
    ///
    /// # Errors
    ///
    /// As [`Medium::refractive_index`].
    pub fn group_index(&self, omega: f64) -> Result<f64> {
        let n = self.refractive_index(omega)?;
        let mut sum = 0.0;
        for r in &self.resonances {
            let denom = omega * omega - r.omega * r.omega;
            sum += r.g * r.g / (denom * denom);
        }
        Ok(n + omega * omega / n * sum)
    }

    /// Fraction of on-shell mode energy carried by the electromagnetic
    /// field, 1 / (n n_g) = 2 omega / d(omega^2 n^2)/d omega. Serves as an
    /// index-only cross-check of the branch-residue weight.
    ///
    /// # Errors
    ///
    /// As [`Medium::refractive_index`].
    pub fn photon_weight(&self, omega: f64) -> Result<f64> {
        Ok(1.0 / (self.refractive_index(omega)? * self.group_index(omega)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn single_unit_resonance() -> Medium {
        Medium::new(vec![Resonance { omega: 1.0, g: 1.0 }]).unwrap()
    }

    #[test]
    fn fused_silica_resonances_ascend() {
        let m = Medium::fused_silica();
        let o: Vec<f64> = m.resonances().iter().map(|r| r.omega).collect();
        assert_relative_eq!(o[0], 0.634_911_387_1, epsilon = 1e-9);
        assert_relative_eq!(o[1], 54.052_904_620_7, epsilon = 1e-8);
        assert_relative_eq!(o[2], 91.853_659_889_5, epsilon = 1e-8);
        let g2: Vec<f64> = m.resonances().iter().map(|r| r.g * r.g).collect();
        assert_relative_eq!(g2[0], 0.361_785_137_2, epsilon = 1e-9);
        assert_relative_eq!(g2[1], 1_191.892_624_631_4, epsilon = 1e-6);
        assert_relative_eq!(g2[2], 5_873.621_094_098_3, epsilon = 1e-6);
    }

    #[test]
    fn fused_silica_index_at_one_micron() {
        let m = Medium::fused_silica();
        let omega = 2.0 * PI / 1.0;
        assert_relative_eq!(m.n_squared(omega).unwrap(), 2.103_710_661_5, epsilon = 1e-9);
        assert_relative_eq!(
            m.refractive_index(omega).unwrap(),
            1.450_417_409_4,
            epsilon = 1e-9
        );
    }

    #[test]
    fn fused_silica_index_at_650_nm() {
        let m = Medium::fused_silica();
        let omega = 2.0 * PI / 0.65;
        assert_relative_eq!(
            m.refractive_index(omega).unwrap(),
            1.456_534_97,
            epsilon = 1e-8
        );
    }

    #[test]
    fn index_is_even_in_frequency() {
        let m = Medium::fused_silica();
        let omega = 2.0 * PI / 0.8;
        assert_eq!(
            m.n_squared(omega).unwrap(),
            m.n_squared(-omega).unwrap()
        );
    }

    #[test]
    fn dispersion_zero_at_golden_ratio_branches() {
        // Single resonance with k = Omega = g = 1: branch frequencies are
        // 1/phi and phi (phi the golden ratio).
        let m = single_unit_resonance();
        let phi = 0.5 * (1.0 + 5.0_f64.sqrt());
        assert_relative_eq!(m.dispersion_d(1.0, phi).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(
            m.dispersion_d(1.0, 1.0 / phi).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn pole_guard_trips() {
        let m = Medium::fused_silica();
        let target = m.resonances()[1].omega + 1e-10;
        assert!(matches!(
            m.n_squared(target),
            Err(Error::PoleAtResonance { .. })
        ));
    }

    #[test]
    fn evanescent_gap_rejected_for_index() {
        // Just above a strong resonance n^2 < 0.
        let m = single_unit_resonance();
        let omega = 1.1;
        assert!(m.n_squared(omega).unwrap() < 0.0);
        assert!(matches!(
            m.refractive_index(omega),
            Err(Error::EvanescentGap { .. })
        ));
    }

    #[test]
    fn group_index_matches_finite_difference() {
        let m = Medium::fused_silica();
        let omega = 2.0 * PI / 1.0;
        let h = 1e-6;
        let fd = ((omega + h) * m.refractive_index(omega + h).unwrap()
            - (omega - h) * m.refractive_index(omega - h).unwrap())
            / (2.0 * h);
        assert_relative_eq!(m.group_index(omega).unwrap(), fd, epsilon = 1e-8);
    }

    #[test]
    fn photon_weight_golden_ratio_value() {
        // Upper branch of the unit single-resonance medium at k = 1.
        let m = single_unit_resonance();
        let phi = 0.5 * (1.0 + 5.0_f64.sqrt());
        assert_relative_eq!(
            m.photon_weight(phi).unwrap(),
            0.723_606_797_7,
            epsilon = 1e-9
        );
    }

    #[test]
    fn photon_weight_matches_dispersion_slope() {
        // 1/(n n_g) = 2 omega / d(omega^2 n^2)/d omega.
        let m = Medium::fused_silica();
        let omega = 2.0 * PI / 0.8;
        let h = 1e-6;
        let f = |w: f64| w * w * m.n_squared(w).unwrap();
        let slope = (f(omega + h) - f(omega - h)) / (2.0 * h);
        assert_relative_eq!(
            m.photon_weight(omega).unwrap(),
            2.0 * omega / slope,
            epsilon = 1e-8
        );
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(Medium::new(vec![]).is_err());
        assert!(Medium::new(vec![Resonance { omega: -1.0, g: 1.0 }]).is_err());
        assert!(Medium::new(vec![
            Resonance { omega: 2.0, g: 1.0 },
            Resonance { omega: 1.0, g: 1.0 },
        ])
        .is_err());
        assert!(Medium::from_sellmeier(&[(0.5, -1.0)]).is_err());
    }
}
