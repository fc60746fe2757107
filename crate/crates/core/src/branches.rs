//! Polariton branch frequencies and Hopfield weights.
//!
//! For N polarisation resonances, D(k, omega) = 0 has N + 1 positive
//! branches omega_alpha(k), indexed from 0 in ascending frequency. In
//! x = omega^2 the dispersion zeros are roots of the polynomial
//!
//! P(x) = (x - k^2) prod_i (x - Omega_i^2)
//!        - sum_i g_i^2 x prod_{j != i} (x - Omega_j^2),
//!
//! whose roots interlace the resonances: one branch below Omega_1, one in
//! each resonance gap, one above Omega_N. The residue of 1/P at x_alpha,
//! normalised to the free-field case, gives the Hopfield weight
//!
//! C_alpha = prod_i (x_alpha - Omega_i^2) / prod_{gamma != alpha}
//!           (x_alpha - x_gamma),
//!
//! the fraction of mode energy in the electromagnetic field; the weights
//! are non-negative and sum to 1.

use crate::medium::Medium;
use crate::numerics::roots::bracketed_root;
use crate::{Error, Result};

/// Relative tolerance on x = omega^2 for branch roots.
const ROOT_REL_TOL: f64 = 1e-14;

/// Two branches closer than this relative separation are degenerate.
const DEGENERACY_REL_TOL: f64 = 1e-8;

/// Branch frequencies and Hopfield weights at one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchModes {
    /// Wavenumber (rad/um).
    pub k: f64,
    /// Branch frequencies (rad/um), ascending; one more than the number of
    /// resonances.
    pub omegas: Vec<f64>,
    /// Hopfield weights per branch, in [0, 1], summing to 1.
    pub weights: Vec<f64>,
}

/// Evaluates P(x) for the active (g > 0) resonances.
fn eval_p(x: f64, k_sq: f64, active: &[(f64, f64)]) -> f64 {
    let mut lead = x - k_sq;
    for &(omega_sq, _) in active {
        lead *= x - omega_sq;
    }
    let mut coupling = 0.0;
    for (i, &(_, g_sq)) in active.iter().enumerate() {
        let mut term = g_sq * x;
        for (j, &(omega_sq, _)) in active.iter().enumerate() {
            if j != i {
                term *= x - omega_sq;
            }
        }
        coupling += term;
    }
    lead - coupling
}

/// Solves the N + 1 branch frequencies at wavenumber `k`, ascending.
///
/// Resonances with g = 0 pin a branch exactly at their frequency; the rest
/// are bracketed between consecutive resonances and polished to
/// [`ROOT_REL_TOL`]. At k = 0 the lowest branch is exactly zero.
///
/// # Errors
///
/// [`Error::BranchSolve`] if a bracket fails (non-finite k),
/// [`Error::DegenerateBranches`] if adjacent branches coincide within
/// [`DEGENERACY_REL_TOL`].
pub fn branch_frequencies(medium: &Medium, k: f64) -> Result<Vec<f64>> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::BranchSolve {
            k,
            message: "wavenumber must be finite and non-negative".into(),
        });
    }
    let k_sq = k * k;
    let active: Vec<(f64, f64)> = medium
        .resonances()
        .iter()
        .filter(|r| r.g > 0.0)
        .map(|r| (r.omega * r.omega, r.g * r.g))
        .collect();
    let pinned: Vec<f64> = medium
        .resonances()
        .iter()
        .filter(|r| r.g == 0.0)
        .map(|r| r.omega)
        .collect();

    let mut roots_x = Vec::with_capacity(active.len() + 1);
    let p = |x: f64| eval_p(x, k_sq, &active);

    // Interval edges in x: 0, the active resonances, then an upper bound
    // where the leading term dominates.
    let mut edges = vec![0.0];
    edges.extend(active.iter().map(|&(omega_sq, _)| omega_sq));
    let g_sq_total: f64 = active.iter().map(|&(_, g_sq)| g_sq).sum();
    let mut upper = k_sq + active.last().map_or(0.0, |&(o, _)| o) + g_sq_total + 1.0;
    for _ in 0..200 {
        if p(upper) > 0.0 {
            break;
        }
        upper *= 2.0;
    }
    edges.push(upper);

    for (idx, w) in edges.windows(2).enumerate() {
        if idx == 0 && p(0.0) == 0.0 {
            // k = 0 (or underflowed): the lowest branch sits at omega = 0.
            roots_x.push(0.0);
            continue;
        }
        let x = bracketed_root(p, w[0], w[1], ROOT_REL_TOL).map_err(|e| Error::BranchSolve {
            k,
            message: e.to_string(),
        })?;
        roots_x.push(x);
    }

    let mut omegas: Vec<f64> = roots_x.into_iter().map(f64::sqrt).collect();
    omegas.extend_from_slice(&pinned);
    omegas.sort_by(f64::total_cmp);

    for (alpha, w) in omegas.windows(2).enumerate() {
        if w[1] - w[0] < DEGENERACY_REL_TOL * w[1].max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateBranches {
                k,
                alpha,
                omega: w[1],
            });
        }
    }
    Ok(omegas)
}

/// Hopfield weights for branch frequencies at one wavenumber.
///
/// `omegas` must be the full ascending branch set from
/// [`branch_frequencies`] (distinct, one per branch); weights computed for a
/// subset are meaningless.
pub fn hopfield_coefficients(medium: &Medium, omegas: &[f64]) -> Vec<f64> {
    omegas
        .iter()
        .map(|&omega_alpha| {
            let x = omega_alpha * omega_alpha;
            let mut num = 1.0;
            for r in medium.resonances() {
                num *= x - r.omega * r.omega;
            }
            let mut den = 1.0;
            for &omega_gamma in omegas {
                if omega_gamma != omega_alpha {
                    den *= x - omega_gamma * omega_gamma;
                }
            }
            num / den
        })
        .collect()
}

/// Branch frequencies and Hopfield weights together.
///
/// # Errors
///
/// As [`branch_frequencies`].
pub fn branch_modes(medium: &Medium, k: f64) -> Result<BranchModes> {
    let omegas = branch_frequencies(medium, k)?;
    let weights = hopfield_coefficients(medium, &omegas);
    Ok(BranchModes { k, omegas, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::Resonance;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn unit_medium() -> Medium {
        Medium::new(vec![Resonance { omega: 1.0, g: 1.0 }]).unwrap()
    }

    #[test]
    fn golden_ratio_branches() {
        let omegas = branch_frequencies(&unit_medium(), 1.0).unwrap();
        let phi = 0.5 * (1.0 + 5.0_f64.sqrt());
        assert_eq!(omegas.len(), 2);
        assert_relative_eq!(omegas[0], 1.0 / phi, epsilon = 1e-12);
        assert_relative_eq!(omegas[1], phi, epsilon = 1e-12);
    }

    #[test]
    fn golden_ratio_weights() {
        let modes = branch_modes(&unit_medium(), 1.0).unwrap();
        assert_relative_eq!(modes.weights[1], 0.723_606_797_7, epsilon = 1e-9);
        assert_relative_eq!(modes.weights[0], 0.276_393_202_3, epsilon = 1e-9);
    }

    #[test]
    fn fused_silica_on_shell_roundtrip() {
        // k chosen on shell at lambda = 1 um must reproduce omega = 2 pi on
        // the optical branch (index 1, between the first two resonances).
        let m = Medium::fused_silica();
        let omega = 2.0 * PI;
        let k = omega * m.refractive_index(omega).unwrap();
        let omegas = branch_frequencies(&m, k).unwrap();
        assert_eq!(omegas.len(), 4);
        assert_relative_eq!(omegas[1], omega, epsilon = 1e-10);
    }

    #[test]
    fn weights_sum_to_one_and_match_index_route() {
        let m = Medium::fused_silica();
        for &k in &[0.5, 2.0, 9.113, 40.0, 150.0] {
            let modes = branch_modes(&m, k).unwrap();
            let total: f64 = modes.weights.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-10);
            for (&omega_alpha, &c) in modes.omegas.iter().zip(&modes.weights) {
                // Independent route through the refractive and group index,
                // valid on shell wherever the branch is not pinned at a
                // resonance.
                let via_index = m.photon_weight(omega_alpha).unwrap();
                assert_relative_eq!(c, via_index, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn zero_wavenumber_has_zero_branch() {
        let m = Medium::fused_silica();
        let omegas = branch_frequencies(&m, 0.0).unwrap();
        assert_eq!(omegas[0], 0.0);
        // Remaining branches sit at the upper gap edges, above each
        // resonance.
        for (r, &omega) in m.resonances().iter().zip(&omegas[1..]) {
            assert!(omega > r.omega);
        }
        let weights = hopfield_coefficients(&m, &omegas);
        let total: f64 = weights.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn decoupled_resonance_pins_branch() {
        let m = Medium::new(vec![
            Resonance { omega: 1.0, g: 1.0 },
            Resonance { omega: 5.0, g: 0.0 },
        ])
        .unwrap();
        let modes = branch_modes(&m, 2.0).unwrap();
        assert_eq!(modes.omegas.len(), 3);
        // The g = 0 resonance appears exactly, with zero weight.
        assert!(modes.omegas.contains(&5.0));
        let idx = modes.omegas.iter().position(|&w| w == 5.0).unwrap();
        assert_eq!(modes.weights[idx], 0.0);
        let total: f64 = modes.weights.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn near_degenerate_resonances_rejected() {
        let m = Medium::new(vec![
            Resonance {
                omega: 1.0,
                g: 1e-10,
            },
            Resonance {
                omega: 1.0 + 1e-12,
                g: 1e-10,
            },
        ])
        .unwrap();
        assert!(matches!(
            branch_frequencies(&m, 3.0),
            Err(Error::DegenerateBranches { .. })
        ));
    }

    #[test]
    fn random_media_interlace_and_conserve_weight() {
        let mut rng = StdRng::seed_from_u64(0x5eed_b2a7);
        for _ in 0..200 {
            let n_res = rng.gen_range(1..=4);
            let mut omega = 0.0;
            let resonances: Vec<Resonance> = (0..n_res)
                .map(|_| {
                    omega += rng.gen_range(0.5..40.0);
                    let g = if rng.gen_bool(0.15) {
                        0.0
                    } else {
                        rng.gen_range(0.1..30.0)
                    };
                    Resonance { omega, g }
                })
                .collect();
            let m = Medium::new(resonances.clone()).unwrap();
            let k = rng.gen_range(0.0..120.0);
            let modes = branch_modes(&m, k).unwrap();

            assert_eq!(modes.omegas.len(), n_res + 1);
            for w in modes.omegas.windows(2) {
                assert!(w[0] < w[1]);
            }
            // Interlacing: branch alpha lies at or below resonance alpha+1
            // and at or above resonance alpha.
            for (alpha, &omega_alpha) in modes.omegas.iter().enumerate() {
                if alpha > 0 {
                    assert!(omega_alpha >= resonances[alpha - 1].omega);
                }
                if alpha < n_res {
                    assert!(omega_alpha <= resonances[alpha].omega);
                }
            }
            // On-shell residual, skipping branches pinned at resonances.
            for &omega_alpha in &modes.omegas {
                if omega_alpha == 0.0
                    || resonances
                        .iter()
                        .any(|r| (omega_alpha - r.omega).abs() < 1e-6)
                {
                    continue;
                }
                let d = m.dispersion_d(k, omega_alpha).unwrap();
                let scale = (k * k).max(omega_alpha * omega_alpha);
                assert!(
                    d.abs() <= 1e-9 * scale,
                    "residual {d} at k {k} omega {omega_alpha}"
                );
            }
            let total: f64 = modes.weights.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-9);
            for &c in &modes.weights {
                assert!((-1e-12..=1.0 + 1e-12).contains(&c));
            }
        }
    }
}
