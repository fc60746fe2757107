//! Shared numerical kernels.
//!
//! Root bracketing, adaptive Gauss-Kronrod quadrature, composite Simpson
//! rules generic over the value type, a Dormand-Prince 4(5) integrator, and
//! Gauss-Hermite rules. Physics modules build on these; nothing here knows
//! about media or modes.

pub mod ode;
pub mod quad;
pub mod roots;
