//! Per-mode Fock wavefunctionals and driven-oscillator transition
//! amplitudes.
//!
//! Each normal mode is a complex harmonic oscillator A(t) with Lagrangian
//! L = (|A'|^2 - omega^2 |A|^2 + J* A + J A*) / 2, two real degrees of
//! freedom and phase-space measure d^2A = 2 dx dy. Number states hold m
//! quanta in the -k mode and n in the +k mode,
//!
//! Psi_mn(A, t) = sqrt(omega / 2 pi) exp(-omega |A|^2 / 2)
//!                H_mn(sqrt(omega) A, sqrt(omega) A*)
//!                exp(-i (m + n) omega t) / sqrt(m! n!),
//!
//! with the complex Hermite polynomials
//! H_mn(y, z) = sum_k (-1)^k k! C(m,k) C(n,k) y^{m-k} z^{n-k}.
//! The argument order is fixed by the expansion phi_a = sum psi_mn(a)
//! Psi_mn: the coefficient of the one-quantum state Psi_01 proportional to
//! A* must be psi_01 proportional to a.
//!
//! A linear drive J(t) over the window [t_i, t_f] enters through two data:
//! the response integrals beta_{+-} = (4 omega)^{-1/2} integral
//! exp(+-i omega (t - t_i)) J(t) dt and one time-ordered bilinear. From
//! these the boundary kernel
//!
//! K(A_f, t_f; A_i, t_i) = omega / (4 pi i sin(omega T)) exp(i S_cl),
//!
//! the vacuum persistence amplitude G_00 = exp(-(|b+|^2 + |b-|^2)/2)
//! exp(-i omega T), the Fock transition amplitudes G_{mn<-pq} and their
//! coherent-state generating functional F(b, a) all follow in closed form.
//! The zero-point phase appears exactly once, inside G_00; the Fock
//! energies are the renormalised E_mn = (m + n) omega. The exact boundary
//! kernel carries one further drive-bilinear global phase that every
//! transition amplitude drops; [`drive_global_phase`] returns it.

use num_complex::Complex64;

use crate::numerics::quad::{cumulative_simpson, simpson};
use crate::{Error, Result};

/// Largest supported Fock order per index.
pub const MAX_ORDER: usize = 64;

/// Caustic guard on |sin(omega T)| for the boundary kernel and action.
pub const CAUSTIC_TOLERANCE: f64 = 1e-9;

fn check_order(indices: &[usize]) -> Result<()> {
    for &i in indices {
        if i > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: i,
                max: MAX_ORDER,
            });
        }
    }
    Ok(())
}

/// sqrt(n!) computed multiplicatively; exact to f64 rounding for n <= 64.
fn sqrt_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).sqrt()).product()
}

/// Two-argument complex Hermite polynomial H_mn(y, z), evaluated through
/// the recurrence H_{m+1,n} = y H_{m,n} - n H_{m,n-1} from H_{0,n} = z^n.
///
/// # Errors
///
/// [`Error::OrderTooLarge`] beyond [`MAX_ORDER`].
pub fn hermite_two(m: usize, n: usize, y: Complex64, z: Complex64) -> Result<Complex64> {
    check_order(&[m, n])?;
    let mut row: Vec<Complex64> = (0..=n as u32).map(|j| z.powu(j)).collect();
    for _ in 0..m {
        let mut prev_lower = Complex64::new(0.0, 0.0);
        for (j, value) in row.iter_mut().enumerate() {
            let next = y * *value - (j as f64) * prev_lower;
            prev_lower = *value;
            *value = next;
        }
    }
    Ok(row[n])
}

/// Diagonal complex Hermite polynomial H_mn(x*, x).
///
/// # Errors
///
/// As [`hermite_two`].
pub fn hermite_complex(m: usize, n: usize, x: Complex64) -> Result<Complex64> {
    hermite_two(m, n, x.conj(), x)
}

/// Number-state wavefunctional Psi_mn(A, t) for a mode of frequency
/// `omega`.
///
/// # Errors
///
/// As [`hermite_two`].
pub fn wavefunctional(
    m: usize,
    n: usize,
    omega: f64,
    a: Complex64,
    t: f64,
) -> Result<Complex64> {
    let root = omega.sqrt();
    let h = hermite_two(m, n, root * a, root * a.conj())?;
    let norm = (omega / (2.0 * std::f64::consts::PI)).sqrt()
        / (sqrt_factorial(m) * sqrt_factorial(n));
    let gauss = (-0.5 * omega * a.norm_sqr()).exp();
    let phase = Complex64::new(0.0, -((m + n) as f64) * omega * t).exp();
    Ok(norm * gauss * h * phase)
}

/// Expansion coefficient psi_mn(a) of the displaced Gaussian functional
/// phi_a over the number states: phi_a(A) = sum_mn psi_mn(a) Psi_mn(A, 0),
/// psi_mn(a) = exp(-omega |a|^2 / 4) (omega/4)^{(m+n)/2} (a*)^m a^n /
/// sqrt(m! n!).
///
/// # Errors
///
/// [`Error::OrderTooLarge`] beyond [`MAX_ORDER`].
pub fn coherent_coefficient(m: usize, n: usize, omega: f64, a: Complex64) -> Result<Complex64> {
    check_order(&[m, n])?;
    let envelope = (-0.25 * omega * a.norm_sqr()).exp();
    let scale = (0.25 * omega).powf(0.5 * (m + n) as f64);
    Ok(envelope * scale * a.conj().powu(m as u32) * a.powu(n as u32)
        / (sqrt_factorial(m) * sqrt_factorial(n)))
}

/// Reduced data of a drive J(t) over a window [t_i, t_f] at mode frequency
/// omega: the two response integrals and the time-ordered bilinear that
/// enter the classical action and every transition amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveIntegrals {
    /// Mode frequency (rad/um).
    pub omega: f64,
    /// Window start (um).
    pub t_i: f64,
    /// Window end (um).
    pub t_f: f64,
    /// beta_+ = (4 omega)^{-1/2} integral exp(+i omega (t - t_i)) J dt.
    pub beta_plus: Complex64,
    /// beta_- = (4 omega)^{-1/2} integral exp(-i omega (t - t_i)) J dt.
    pub beta_minus: Complex64,
    /// Time-ordered bilinear integral over t' < t of
    /// J*(t) sin(omega (t_f - t)) sin(omega (t' - t_i)) J(t').
    pub bilinear: Complex64,
}

impl DriveIntegrals {
    /// Window span T = t_f - t_i.
    pub fn t_span(&self) -> f64 {
        self.t_f - self.t_i
    }

    /// The undriven window (J = 0).
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on a non-positive frequency or empty window.
    pub fn vacuum(omega: f64, t_i: f64, t_f: f64) -> Result<Self> {
        check_window(omega, t_i, t_f)?;
        Ok(DriveIntegrals {
            omega,
            t_i,
            t_f,
            beta_plus: Complex64::new(0.0, 0.0),
            beta_minus: Complex64::new(0.0, 0.0),
            bilinear: Complex64::new(0.0, 0.0),
        })
    }

    /// Computes the integrals from a drive sampled on a uniform grid of
    /// `samples` points (forced odd, at least 9) by composite Simpson rules;
    /// the bilinear uses one cumulative pass, so the cost is linear in
    /// `samples`.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] on a non-positive frequency or empty window.
    pub fn from_drive<F>(omega: f64, t_i: f64, t_f: f64, samples: usize, j: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        check_window(omega, t_i, t_f)?;
        let n = samples.max(9) | 1;
        let h = (t_f - t_i) / (n as f64 - 1.0);
        let times: Vec<f64> = (0..n).map(|i| t_i + i as f64 * h).collect();
        let j_vals: Vec<Complex64> = times.iter().map(|&t| j(t)).collect();

        let root = 1.0 / (4.0 * omega).sqrt();
        let plus: Vec<Complex64> = times
            .iter()
            .zip(&j_vals)
            .map(|(&t, &jv)| Complex64::new(0.0, omega * (t - t_i)).exp() * jv)
            .collect();
        let minus: Vec<Complex64> = times
            .iter()
            .zip(&j_vals)
            .map(|(&t, &jv)| Complex64::new(0.0, -omega * (t - t_i)).exp() * jv)
            .collect();
        let beta_plus = simpson(&plus, h) * root;
        let beta_minus = simpson(&minus, h) * root;

        // inner(t) = integral_{t_i}^{t} sin(omega (t' - t_i)) J(t') dt'.
        let sin_in: Vec<Complex64> = times
            .iter()
            .zip(&j_vals)
            .map(|(&t, &jv)| jv * (omega * (t - t_i)).sin())
            .collect();
        let inner = cumulative_simpson(&sin_in, h);
        let outer: Vec<Complex64> = times
            .iter()
            .zip(&j_vals)
            .zip(&inner)
            .map(|((&t, &jv), &acc)| jv.conj() * (omega * (t_f - t)).sin() * acc)
            .collect();
        let bilinear = simpson(&outer, h);

        Ok(DriveIntegrals {
            omega,
            t_i,
            t_f,
            beta_plus,
            beta_minus,
            bilinear,
        })
    }

    /// integral sin(omega (t - t_i)) J dt, from the betas.
    fn linear_sin_start(&self) -> Complex64 {
        (self.beta_plus - self.beta_minus) * (4.0 * self.omega).sqrt()
            / Complex64::new(0.0, 2.0)
    }

    /// integral cos(omega (t - t_i)) J dt, from the betas.
    fn linear_cos_start(&self) -> Complex64 {
        (self.beta_plus + self.beta_minus) * (4.0 * self.omega).sqrt() * 0.5
    }

    /// integral sin(omega (t_f - t)) J dt, from the betas.
    fn linear_sin_end(&self) -> Complex64 {
        let phase = self.omega * self.t_span();
        self.linear_cos_start() * phase.sin() - self.linear_sin_start() * phase.cos()
    }

    fn sin_omega_t(&self) -> Result<f64> {
        let phase = self.omega * self.t_span();
        let s = phase.sin();
        if s.abs() < CAUSTIC_TOLERANCE {
            return Err(Error::CausticSingularity {
                sin_omega_t: s.abs(),
                omega_t: phase,
            });
        }
        Ok(s)
    }
}

fn check_window(omega: f64, t_i: f64, t_f: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::config(format!(
            "mode frequency must be positive, got {omega}"
        )));
    }
    if !(t_i.is_finite() && t_f.is_finite() && t_f > t_i) {
        return Err(Error::config(format!(
            "drive window must satisfy t_i < t_f, got [{t_i}, {t_f}]"
        )));
    }
    Ok(())
}

/// Classical action of the driven mode with boundary values A(t_i) = a_i,
/// A(t_f) = a_f. Real; block form
///
/// S = omega / (2 sin wT) [ (|a_f|^2 + |a_i|^2) cos wT - 2 Re(a_f* a_i) ]
///   + Re[ a_f L_i* + a_i L_f* ] / sin wT
///   - Re[bilinear] / (omega sin wT),
///
/// with L_i = integral sin(omega (t - t_i)) J dt and L_f the mirrored
/// end-weighted integral.
///
/// # Errors
///
/// [`Error::CausticSingularity`] when |sin(omega T)| is below
/// [`CAUSTIC_TOLERANCE`].
pub fn classical_action(d: &DriveIntegrals, a_f: Complex64, a_i: Complex64) -> Result<f64> {
    let sin_t = d.sin_omega_t()?;
    let cos_t = (d.omega * d.t_span()).cos();

    let boundary = d.omega / (2.0 * sin_t)
        * ((a_f.norm_sqr() + a_i.norm_sqr()) * cos_t - 2.0 * (a_f.conj() * a_i).re);
    let linear = ((a_f * d.linear_sin_start().conj()) + (a_i * d.linear_sin_end().conj())).re
        / sin_t;
    let bilinear = -d.bilinear.re / (d.omega * sin_t);
    Ok(boundary + linear + bilinear)
}

/// Global phase of the exact boundary kernel relative to the transition
/// amplitudes, which drop it as unobservable. With T the window span,
/// gamma = exp(-i omega T) and B the time-ordered bilinear,
///
/// Phi = -cos(wT) (|beta_+|^2 + |beta_-|^2) / (2 sin wT)
///       + Re(gamma beta_+ beta_-*) / sin wT
///       - Re(B) / (omega sin wT).
///
/// Multiplying [`generating_functional`] by exp(i Phi) reproduces the
/// boundary integral of phi_b* K phi_a exactly.
///
/// # Errors
///
/// [`Error::CausticSingularity`] when |sin(omega T)| is below
/// [`CAUSTIC_TOLERANCE`].
pub fn drive_global_phase(d: &DriveIntegrals) -> Result<f64> {
    let sin_t = d.sin_omega_t()?;
    let cos_t = (d.omega * d.t_span()).cos();
    let gamma = Complex64::new(0.0, -d.omega * d.t_span()).exp();
    let decay = d.beta_plus.norm_sqr() + d.beta_minus.norm_sqr();
    let cross = (gamma * d.beta_plus * d.beta_minus.conj()).re;
    Ok(-cos_t * decay / (2.0 * sin_t) + cross / sin_t - d.bilinear.re / (d.omega * sin_t))
}

/// Boundary kernel K(a_f, t_f; a_i, t_i) =
/// omega / (4 pi i sin(omega T)) exp(i S_cl).
///
/// # Errors
///
/// As [`classical_action`].
pub fn kernel(d: &DriveIntegrals, a_f: Complex64, a_i: Complex64) -> Result<Complex64> {
    let sin_t = d.sin_omega_t()?;
    let action = classical_action(d, a_f, a_i)?;
    let prefactor = Complex64::new(0.0, -d.omega / (4.0 * std::f64::consts::PI * sin_t));
    Ok(prefactor * Complex64::new(0.0, action).exp())
}

/// Vacuum persistence amplitude G_00 =
/// exp(-(|beta_+|^2 + |beta_-|^2)/2) exp(-i omega T). Carries the
/// zero-point phase of the two real degrees of freedom.
pub fn vacuum_persistence(d: &DriveIntegrals) -> Complex64 {
    let decay = (-0.5 * (d.beta_plus.norm_sqr() + d.beta_minus.norm_sqr())).exp();
    decay * Complex64::new(0.0, -d.omega * d.t_span()).exp()
}

/// Transition amplitude G_{mn <- pq} between number states under the drive:
///
/// G = G_00 (-1)^{m+q} exp(-i (m+n) omega T) (m! n! p! q!)^{-1/2}
///     H_nq(i beta_+, -i beta_+*) H_pm(i beta_-, -i beta_-*).
///
/// # Errors
///
/// [`Error::OrderTooLarge`] beyond [`MAX_ORDER`].
pub fn transition_amplitude(
    d: &DriveIntegrals,
    m: usize,
    n: usize,
    p: usize,
    q: usize,
) -> Result<Complex64> {
    check_order(&[m, n, p, q])?;
    let i = Complex64::new(0.0, 1.0);
    let h_plus = hermite_two(n, q, i * d.beta_plus, -i * d.beta_plus.conj())?;
    let h_minus = hermite_two(p, m, i * d.beta_minus, -i * d.beta_minus.conj())?;
    let sign = if (m + q).is_multiple_of(2) { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, -((m + n) as f64) * d.omega * d.t_span()).exp();
    let norm = sqrt_factorial(m) * sqrt_factorial(n) * sqrt_factorial(p) * sqrt_factorial(q);
    Ok(vacuum_persistence(d) * sign * phase * h_plus * h_minus / norm)
}

/// Generating functional F(b, a) = integral of phi_b* K phi_a over both
/// boundaries; the closed form is
///
/// F = G_00 exp(-omega (|b|^2 + |a|^2) / 4)
///     exp(gamma omega (b a* + b* a) / 4)
///     exp(i gamma sqrt(omega/4) (b beta_-* + b* beta_+))
///     exp(i sqrt(omega/4) (a beta_+* + a* beta_-)),
///
/// with gamma = exp(-i omega T). Regular at caustics. Matches the
/// number-state double expansion sum_mnpq psi_mn(b)* G_{mn<-pq} psi_pq(a).
pub fn generating_functional(d: &DriveIntegrals, b: Complex64, a: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let gamma = Complex64::new(0.0, -d.omega * d.t_span()).exp();
    let root = (0.25 * d.omega).sqrt();
    let gauss = (-0.25 * d.omega * (b.norm_sqr() + a.norm_sqr())).exp();
    let cross = (gamma * 0.25 * d.omega * (b * a.conj() + b.conj() * a)).exp();
    let linear_b = (i * gamma * root * (b * d.beta_minus.conj() + b.conj() * d.beta_plus)).exp();
    let linear_a = (i * root * (a * d.beta_plus.conj() + a.conj() * d.beta_minus)).exp();
    vacuum_persistence(d) * gauss * cross * linear_b * linear_a
}
