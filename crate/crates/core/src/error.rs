//! Error taxonomy shared by every module in the crate.
//!
//! Numeric failures carry enough context to report which mode or parameter
//! triggered them. Configuration problems are kept in a single variant so the
//! CLI can map them to a distinct exit code.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Dispersion evaluated within the pole guard of a material resonance.
    #[error("frequency {omega} rad/um is within {tolerance} of resonance {omega_res} rad/um")]
    PoleAtResonance {
        /// Requested frequency (rad/um).
        omega: f64,
        /// Offending resonance frequency (rad/um).
        omega_res: f64,
        /// Absolute guard width (rad/um).
        tolerance: f64,
    },

    /// Refractive index requested where n^2 < 0 (evanescent gap).
    #[error("n^2 = {n_squared} < 0 at omega = {omega} rad/um; no propagating index")]
    EvanescentGap {
        /// Requested frequency (rad/um).
        omega: f64,
        /// Negative squared index at that frequency.
        n_squared: f64,
    },

    /// Branch solver failed to bracket or converge on a dispersion root.
    #[error("branch solve failed at k = {k} rad/um: {message}")]
    BranchSolve {
        /// Wavenumber being solved (rad/um).
        k: f64,
        /// What went wrong.
        message: String,
    },

    /// Two adjacent branch frequencies coincide to within the degeneracy guard.
    #[error("branches {alpha} and {} degenerate at k = {k} rad/um: omega = {omega}", alpha + 1)]
    DegenerateBranches {
        /// Wavenumber (rad/um).
        k: f64,
        /// Lower of the two coinciding branch indices (0-based).
        alpha: usize,
        /// Shared frequency (rad/um).
        omega: f64,
    },

    /// Hopfield projection requested off shell where the projector argument
    /// is negative.
    #[error("projection ratio {ratio} < 0 at omega = {omega} rad/um (branch omega_alpha = {omega_alpha})")]
    ProjectionDomain {
        /// Requested frequency (rad/um).
        omega: f64,
        /// Branch frequency (rad/um).
        omega_alpha: f64,
        /// Negative ratio (omega^2 - omega_alpha^2) / D.
        ratio: f64,
    },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureNotConverged {
        /// Best integral estimate at failure.
        estimate: f64,
        /// Remaining error bound at failure.
        error_bound: f64,
    },

    /// Adaptive ODE integration step shrank below floating-point resolution.
    #[error("ODE step underflow at t = {t}: step {h}")]
    StepUnderflow {
        /// Time at which the step collapsed.
        t: f64,
        /// Final attempted step.
        h: f64,
    },

    /// Second-order propagator integrand has a pole inside a support segment.
    #[error("propagator pole at omega'' = {pole} rad/um inside integration segment [{lo}, {hi}]")]
    PoleInsideSupport {
        /// Pole location (rad/um).
        pole: f64,
        /// Segment lower edge (rad/um).
        lo: f64,
        /// Segment upper edge (rad/um).
        hi: f64,
    },

    /// Boundary-value Green's function undefined: the homogeneous solutions
    /// are (numerically) linearly dependent over the window.
    #[error("Wronskian {wronskian} too small; boundary-value Green's function singular")]
    WronskianSingular {
        /// Wronskian of the two homogeneous solutions.
        wronskian: f64,
    },

    /// Oscillator kernel evaluated at a caustic, sin(omega T) ~ 0.
    #[error("kernel caustic: |sin(omega T)| = {sin_omega_t} at omega T = {omega_t}")]
    CausticSingularity {
        /// Value of |sin(omega T)|.
        sin_omega_t: f64,
        /// Phase omega T.
        omega_t: f64,
    },

    /// Fock order beyond the supported combinatorial range.
    #[error("state order {order} exceeds maximum {max}")]
    OrderTooLarge {
        /// Requested order.
        order: usize,
        /// Largest supported order.
        max: usize,
    },

    /// Emission process with an invalid branch combination.
    #[error("invalid process: {message}")]
    InvalidProcess {
        /// What is wrong with the branch combination.
        message: String,
    },

    /// Transverse profile invalid: confinement parameter alpha_k <= 0.
    #[error("degenerate transverse profile: alpha_k = {alpha_k} at omega = {omega} rad/um")]
    DegenerateProfile {
        /// Confinement parameter (rad/um)^2 scale.
        alpha_k: f64,
        /// Frequency (rad/um).
        omega: f64,
    },

    /// Configuration file invalid or inconsistent.
    #[error("config error: {message}")]
    Config {
        /// Human-readable description of the problem.
        message: String,
    },

    /// Underlying I/O failure (config read, CSV write).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for a configuration error.
    pub fn config(message: impl Into<String>) -> Self {
        Error::Config {
            message: message.into(),
        }
    }

    /// Exit code the CLI maps this error to: 2 for configuration problems,
    /// 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
