//! Vacuum pair emission spectra from temporally modulated dispersive media.
//!
//! Models a transparent medium whose polarisation response is a sum of
//! Lorentzian resonances, n^2(omega) = 1 - sum_i g_i^2 / (omega^2 - Omega_i^2),
//! with one resonance frequency modulated in time by a Gaussian-windowed
//! two-tone drive. The modulation parametrically amplifies vacuum
//! fluctuations and emits polariton pairs; this crate computes the pair
//! emission amplitude per normal mode, the emission spectrum over a
//! wavelength window, and the resonance structure produced by
//! frequency mixing of the two drive tones at second order.
//!
//! Conventions used throughout:
//!
//! - natural units, c = hbar = epsilon_0 = 1;
//! - frequencies omega and wavenumbers k in rad/um, times and lengths in um
//!   (1 fs of lab time is [`UM_PER_FS`] um);
//! - polariton branches are indexed from 0 in ascending frequency at fixed k;
//! - per-mode field amplitudes A_k are complex, with phase-space measure
//!   d^2A = 2 dx dy for A = x + i y.
//!
//! Module map:
//!
//! - [`medium`]: refractive index, dispersion function, Sellmeier input;
//! - [`branches`]: polariton branch frequencies and Hopfield weights;
//! - [`modulation`]: the two-tone Gaussian drive and its spectrum;
//! - [`propagators`]: perturbative mode propagators and the driven-oscillator
//!   Green's-function oracle used to validate them;
//! - [`states`]: per-mode Fock wavefunctionals, driven-oscillator kernel and
//!   transition amplitudes;
//! - [`amplitudes`]: pair emission amplitudes, spectrum assembly, peak
//!   labelling and the emitted-pair rate estimate;
//! - [`fiber`]: transverse confinement corrections for a weakly guiding
//!   parabolic profile;
//! - [`numerics`]: root bracketing, adaptive quadrature, ODE integration and
//!   Gauss-Hermite rules shared by the physics modules;
//! - [`config`] and [`runner`]: TOML-driven sweep execution for the CLI.

pub mod amplitudes;
pub mod branches;
pub mod config;
pub mod error;
pub mod fiber;
pub mod medium;
pub mod modulation;
pub mod numerics;
pub mod propagators;
pub mod runner;
pub mod states;

pub use error::{Error, Result};

/// Micrometres of optical path per femtosecond of lab time (c in um/fs).
pub const UM_PER_FS: f64 = 0.299_792_458;
