//! Fiber-like geometry: parabolic transverse index profile, Hermite-Gauss
//! transverse modes, and the mode-shifted dispersion relation.
//!
//! A weak transverse profile eps(x, y, omega) = eps(omega) (1 - Delta rho^2)
//! confines the field into Hermite-Gauss modes u_nm with per-frequency
//! strength
//!
//! alpha(omega) = (Delta / 2) sum_i g_i^2 omega^2 / (omega^2 - Omega_i^2)^2,
//!
//! summed over resonances (the coupling appears squared per resonance). The
//! transverse quantization shifts the bulk dispersion,
//!
//! D_nm(k, omega) = -k^2 + omega^2 n^2(omega)
//!                  - (n + m + 1/2) Delta sum_i g_i^2 omega^2
//!                    / (omega^2 - Omega_i^2)^2,
//!
//! whose root is the bulk root at the effective wavenumber k_eff with
//! k_eff^2 = k^2 + 2 (n + m + 1/2) alpha(omega). The profile strength
//! depends on frequency, so the branch solve iterates that fixed point to
//! self-consistency (the single-step evaluation at the bulk frequency is
//! the first iterate). At the converged root the transverse eigenvalue
//! identity (omega^2 n^2 - k^2) / 2 = (n + m + 1/2) alpha holds to the
//! iteration tolerance.
//!
//! Units: Delta in rad^2 um^-4 against transverse distance in um, alpha in
//! um^-2, wavenumbers in rad / um.

use crate::branches::branch_frequencies;
use crate::medium::Medium;
use crate::{Error, Result};

/// Fixed-point relative tolerance on the branch frequency.
const SELF_CONSISTENCY_REL_TOL: f64 = 1e-12;

/// Fixed-point iteration cap; the shift is perturbative and converges in a
/// few steps.
const SELF_CONSISTENCY_MAX_ITER: usize = 8;

/// Parabolic-profile fiber over a dispersive medium.
#[derive(Debug, Clone)]
pub struct Fiber {
    medium: Medium,
    delta: f64,
    n: usize,
    m: usize,
}

impl Fiber {
    /// Fiber with profile curvature `delta` >= 0 (rad^2 um^-4) and default
    /// transverse mode orders (n, m).
    ///
    /// # Errors
    ///
    /// [`Error::Config`] when `delta` is negative or not finite.
    pub fn new(medium: Medium, delta: f64, n: usize, m: usize) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::config(format!(
                "fiber profile curvature must be finite and >= 0, got {delta}"
            )));
        }
        Ok(Fiber { medium, delta, n, m })
    }

    /// Underlying dispersive medium.
    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    /// Profile curvature Delta (rad^2 um^-4).
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Default transverse mode orders (n, m).
    pub fn mode_orders(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// Effective harmonic strength alpha(omega) (um^-2).
    ///
    /// # Errors
    ///
    /// [`Error::PoleAtResonance`] at a resonance frequency.
    pub fn alpha(&self, omega: f64) -> Result<f64> {
        self.medium.n_squared(omega)?;
        let sum: f64 = self
            .medium
            .resonances()
            .iter()
            .map(|r| {
                let d = omega * omega - r.omega * r.omega;
                r.g * r.g * omega * omega / (d * d)
            })
            .sum();
        Ok(0.5 * self.delta * sum)
    }

    /// Mode-shifted dispersion D_nm(k, omega); roots are the fiber branch
    /// frequencies for transverse orders (n, m).
    ///
    /// # Errors
    ///
    /// [`Error::PoleAtResonance`] at a resonance frequency.
    pub fn dispersion_d(&self, k: f64, n: usize, m: usize, omega: f64) -> Result<f64> {
        let bulk = self.medium.dispersion_d(k, omega)?;
        let order = (n + m) as f64 + 0.5;
        Ok(bulk - 2.0 * order * self.alpha(omega)?)
    }

    /// Transverse Hermite-Gauss mode u_nm(x, y) at frequency omega,
    ///
    /// u_nm = sqrt(alpha / (2^(n+m) n! m! pi)) e^(-alpha rho^2 / 2)
    ///        H_n(sqrt(alpha) x) H_m(sqrt(alpha) y),
    ///
    /// orthonormal under the plain area measure dx dy.
    ///
    /// # Errors
    ///
    /// [`Error::DegenerateProfile`] when alpha(omega) <= 0 (flat profile or
    /// zero frequency); [`Error::PoleAtResonance`] at a resonance.
    pub fn hermite_gaussian(&self, n: usize, m: usize, x: f64, y: f64, omega: f64) -> Result<f64> {
        let alpha = self.alpha(omega)?;
        if alpha <= 0.0 {
            return Err(Error::DegenerateProfile {
                alpha_k: alpha,
                omega,
            });
        }
        let root = alpha.sqrt();
        let mut log_norm = alpha.ln() - std::f64::consts::PI.ln();
        for j in 1..=n {
            log_norm -= (2.0 * j as f64).ln();
        }
        for j in 1..=m {
            log_norm -= (2.0 * j as f64).ln();
        }
        let gauss = (-0.5 * alpha * (x * x + y * y) + 0.5 * log_norm).exp();
        Ok(gauss * hermite(n, root * x) * hermite(m, root * y))
    }

    /// Branch frequencies for transverse orders (n, m): the bulk branches
    /// re-solved at the self-consistent effective wavenumber. Ascending,
    /// one entry per branch, same count as the bulk solve.
    ///
    /// # Errors
    ///
    /// Propagated bulk branch-solve failures; [`Error::BranchSolve`] when
    /// the fixed point lands on a non-finite frequency.
    pub fn branch_frequencies(&self, k: f64, n: usize, m: usize) -> Result<Vec<f64>> {
        let order = (n + m) as f64 + 0.5;
        let bulk = branch_frequencies(&self.medium, k)?;
        bulk.iter()
            .enumerate()
            .map(|(b, &w0)| self.shifted_branch(k, order, b, w0, n, m))
            .collect()
    }

    /// Single fiber branch frequency; see [`Fiber::branch_frequencies`].
    /// Lets a sweep keep guided branches when another branch is expelled.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidProcess`] on an out-of-range branch index, otherwise
    /// as [`Fiber::branch_frequencies`].
    pub fn branch_frequency(&self, k: f64, branch: usize, n: usize, m: usize) -> Result<f64> {
        let bulk = branch_frequencies(&self.medium, k)?;
        let Some(&w0) = bulk.get(branch) else {
            return Err(Error::InvalidProcess {
                message: format!(
                    "branch index {branch} out of range for {} branches",
                    bulk.len()
                ),
            });
        };
        self.shifted_branch(k, (n + m) as f64 + 0.5, branch, w0, n, m)
    }

    /// One branch of the fixed point k_eff^2 = k^2 + 2 (n + m + 1/2) alpha.
    ///
    /// A bulk root already inside the pole guard (a matter-like asymptote)
    /// is returned unchanged: the root is pinned at the resonance beyond
    /// representable precision and the shift cannot be resolved. A shift
    /// that runs away toward a pole instead of contracting means the
    /// shifted dispersion has lost its root (the profile expels the mode);
    /// that is reported as a branch-solve failure.
    fn shifted_branch(
        &self,
        k: f64,
        order: f64,
        b: usize,
        w0: f64,
        n: usize,
        m: usize,
    ) -> Result<f64> {
        let mut alpha = match self.alpha(w0) {
            Ok(a) => a,
            Err(Error::PoleAtResonance { .. }) => return Ok(w0),
            Err(e) => return Err(e),
        };
        let mut w = w0;
        for _ in 0..SELF_CONSISTENCY_MAX_ITER {
            let k_eff = (k * k + 2.0 * order * alpha).sqrt();
            let next = branch_frequencies(&self.medium, k_eff)?[b];
            if (next - w).abs() <= SELF_CONSISTENCY_REL_TOL * next.abs() {
                return Ok(next);
            }
            w = next;
            alpha = match self.alpha(w) {
                Ok(a) => a,
                Err(Error::PoleAtResonance { .. }) => break,
                Err(e) => return Err(e),
            };
        }
        Err(Error::BranchSolve {
            k,
            message: format!(
                "transverse shift is not perturbative on branch {b} for orders ({n}, {m})"
            ),
        })
    }
}

/// Physicists' Hermite polynomial H_n(x).
fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for j in 1..n {
        let next = 2.0 * x * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}
