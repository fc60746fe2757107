//! C ABI for the vacuum pair emission library.
//!
//! Conventions:
//!
//! - every function returns a [`VmxStatus`]; output pointers are written
//!   only on `Ok`;
//! - handles ([`VmxMedium`]) are created and released by this library
//!   only, one `vmx_medium_free` per successful constructor call;
//! - the most recent failure message is kept per thread and read back
//!   with `vmx_last_error_message`;
//! - panics never cross the boundary: they are caught and reported as
//!   `Panic`.
//!
//! Units match the core library: frequencies and wavenumbers in rad/um,
//! times and lengths in um. Branch and resonance indices are 0-based.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use vacmix::amplitudes::{g_inter, g_intra, AmplitudeOptions};
use vacmix::branches::branch_modes;
use vacmix::medium::Medium;
use vacmix::modulation::Modulation;
use vacmix::Error;

/// Status code returned by every library call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VmxStatus {
    /// Success; output pointers are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullArg = 1,
    /// Invalid parameters (bad resonance data, indices, drive values).
    InvalidConfig = 2,
    /// A numeric routine failed (degenerate branches, pole hit, no root).
    Numeric = 3,
    /// An output buffer was too small; the required size was written.
    BufferTooSmall = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// Opaque handle to a dispersive medium.
pub struct VmxMedium(Medium);

/// Two-tone Gaussian drive parameters, plain data.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VmxModulation {
    /// Index of the driven resonance (0-based, ascending in frequency).
    pub resonance_index: u32,
    /// Fractional modulation depth per tone.
    pub eps: f64,
    /// First tone frequency (rad/um).
    pub nu1_rad_um: f64,
    /// Second tone frequency (rad/um).
    pub nu2_rad_um: f64,
    /// Gaussian window width (um of optical path).
    pub tau_um: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.into());
}

fn fail(e: &Error) -> VmxStatus {
    set_error(e.to_string());
    match e {
        Error::Config { .. } | Error::InvalidProcess { .. } => VmxStatus::InvalidConfig,
        _ => VmxStatus::Numeric,
    }
}

fn guard(f: impl FnOnce() -> VmxStatus) -> VmxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic caught at the C boundary");
            VmxStatus::Panic
        }
    }
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(concat!("argument `", stringify!($ptr), "` is null"));
            return VmxStatus::NullArg;
        }
    };
}

fn modulation_of(raw: &VmxModulation) -> Result<Modulation, Error> {
    Modulation::new(
        raw.resonance_index as usize,
        raw.eps,
        raw.nu1_rad_um,
        raw.nu2_rad_um,
        raw.tau_um,
    )
}

/// Copies the most recent error message of the calling thread into `buf`
/// as a NUL-terminated C string, truncating if needed. Returns the full
/// length of the message including the NUL; call with a null `buf` or
/// zero `capacity` to query the required size. Never fails.
///
/// # Safety
///
/// `buf` must be null or point to at least `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn vmx_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        let needed = bytes.len() + 1;
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        needed
    })
}

/// Creates the built-in fused-silica medium. On success writes a handle
/// that must be released with `vmx_medium_free`.
///
/// # Safety
///
/// `out` must be null or point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn vmx_medium_fused_silica(out: *mut *mut VmxMedium) -> VmxStatus {
    guard(|| {
        nonnull!(out);
        let handle = Box::new(VmxMedium(Medium::fused_silica()));
        unsafe { *out = Box::into_raw(handle) };
        VmxStatus::Ok
    })
}

/// Creates a medium from `terms` Sellmeier pairs (B_i, lambda_i in um).
/// On success writes a handle that must be released with
/// `vmx_medium_free`.
///
/// # Safety
///
/// `b` and `lambda_um` must be null or point to `terms` readable doubles
/// each; `out` must be null or point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn vmx_medium_from_sellmeier(
    b: *const f64,
    lambda_um: *const f64,
    terms: usize,
    out: *mut *mut VmxMedium,
) -> VmxStatus {
    guard(|| {
        nonnull!(b);
        nonnull!(lambda_um);
        nonnull!(out);
        if terms == 0 {
            set_error("at least one Sellmeier term is required");
            return VmxStatus::InvalidConfig;
        }
        let pairs: Vec<(f64, f64)> = (0..terms)
            .map(|i| unsafe { (*b.add(i), *lambda_um.add(i)) })
            .collect();
        match Medium::from_sellmeier(&pairs) {
            Ok(medium) => {
                unsafe { *out = Box::into_raw(Box::new(VmxMedium(medium))) };
                VmxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a medium handle. Null is ignored.
///
/// # Safety
///
/// `medium` must be null or a handle from a constructor of this library
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn vmx_medium_free(medium: *mut VmxMedium) {
    if !medium.is_null() {
        drop(unsafe { Box::from_raw(medium) });
    }
}

/// Writes the number of polariton branches (resonances + 1).
///
/// # Safety
///
/// `medium` must be null or a live handle; `out` must be null or point
/// to a writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn vmx_branch_count(
    medium: *const VmxMedium,
    out: *mut usize,
) -> VmxStatus {
    guard(|| {
        nonnull!(medium);
        nonnull!(out);
        let m = unsafe { &(*medium).0 };
        unsafe { *out = m.resonances().len() + 1 };
        VmxStatus::Ok
    })
}

/// Writes the refractive index n(omega) on the propagating window.
///
/// # Safety
///
/// `medium` must be null or a live handle; `out` must be null or point
/// to a writable double.
#[no_mangle]
pub unsafe extern "C" fn vmx_refractive_index(
    medium: *const VmxMedium,
    omega_rad_um: f64,
    out: *mut f64,
) -> VmxStatus {
    guard(|| {
        nonnull!(medium);
        nonnull!(out);
        let m = unsafe { &(*medium).0 };
        match m.refractive_index(omega_rad_um) {
            Ok(n) => {
                unsafe { *out = n };
                VmxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

fn write_per_branch(
    medium: *const VmxMedium,
    k_rad_um: f64,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
    pick: impl Fn(&vacmix::branches::BranchModes) -> &[f64],
) -> VmxStatus {
    guard(|| {
        nonnull!(medium);
        nonnull!(out);
        nonnull!(written);
        // Safety: pointers checked non-null; validity and capacity are the
        // caller contract of the public wrappers.
        let m = unsafe { &(*medium).0 };
        let needed = m.resonances().len() + 1;
        unsafe { *written = needed };
        if capacity < needed {
            set_error(format!(
                "buffer holds {capacity} values but {needed} branches exist"
            ));
            return VmxStatus::BufferTooSmall;
        }
        match branch_modes(m, k_rad_um) {
            Ok(modes) => {
                let values = pick(&modes);
                unsafe {
                    std::ptr::copy_nonoverlapping(values.as_ptr(), out, needed);
                }
                VmxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Writes the branch frequencies at `k` in ascending order. `written`
/// always receives the branch count; `BufferTooSmall` is returned when
/// `capacity` is below it.
///
/// # Safety
///
/// `medium` must be null or a live handle; `out` must be null or point
/// to `capacity` writable doubles; `written` must be null or point to a
/// writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn vmx_branch_frequencies(
    medium: *const VmxMedium,
    k_rad_um: f64,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> VmxStatus {
    write_per_branch(medium, k_rad_um, out, capacity, written, |m| &m.omegas)
}

/// Writes the photonic Hopfield weights per branch at `k`, each in
/// [0, 1]. Buffer semantics as in `vmx_branch_frequencies`.
///
/// # Safety
///
/// As `vmx_branch_frequencies`.
#[no_mangle]
pub unsafe extern "C" fn vmx_hopfield_weights(
    medium: *const VmxMedium,
    k_rad_um: f64,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> VmxStatus {
    write_per_branch(medium, k_rad_um, out, capacity, written, |m| &m.weights)
}

/// Writes the reference drive for `medium`: resonance 1 driven at
/// Omega_m/5 and Omega_m/6 over a 100 fs FWHM window with the strength
/// of a 1e-3 index shift at 0.65 um.
///
/// # Safety
///
/// `medium` must be null or a live handle; `out` must be null or point
/// to a writable `VmxModulation`.
#[no_mangle]
pub unsafe extern "C" fn vmx_reference_modulation(
    medium: *const VmxMedium,
    out: *mut VmxModulation,
) -> VmxStatus {
    guard(|| {
        nonnull!(medium);
        nonnull!(out);
        let m = unsafe { &(*medium).0 };
        match Modulation::reference_for(m) {
            Ok(drive) => {
                let raw = VmxModulation {
                    resonance_index: drive.resonance_index as u32,
                    eps: drive.eps,
                    nu1_rad_um: drive.nu1,
                    nu2_rad_um: drive.nu2,
                    tau_um: drive.tau,
                };
                unsafe { *out = raw };
                VmxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Writes the pair emission probability |G|^2 for two quanta on branch
/// `alpha` at wavenumber `k`, using the resolved-tone mixing route
/// without the subleading correction.
///
/// # Safety
///
/// `medium` must be null or a live handle; `drive` must be null or point
/// to a readable `VmxModulation`; `out` must be null or point to a
/// writable double.
#[no_mangle]
pub unsafe extern "C" fn vmx_pair_probability_intra(
    medium: *const VmxMedium,
    drive: *const VmxModulation,
    k_rad_um: f64,
    alpha: u32,
    out: *mut f64,
) -> VmxStatus {
    guard(|| {
        nonnull!(medium);
        nonnull!(drive);
        nonnull!(out);
        let m = unsafe { &(*medium).0 };
        let raw = unsafe { &*drive };
        let result = modulation_of(raw).and_then(|d| {
            let modes = branch_modes(m, k_rad_um)?;
            g_intra(m, &modes, &d, alpha as usize, &AmplitudeOptions::default())
        });
        match result {
            Ok(amp) => {
                unsafe { *out = amp.probability() };
                VmxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Writes the pair emission probability |G|^2 for one quantum on branch
/// `alpha` and one on `alpha_p` at wavenumber `k`. The branches must be
/// distinct.
///
/// # Safety
///
/// As `vmx_pair_probability_intra`.
#[no_mangle]
pub unsafe extern "C" fn vmx_pair_probability_inter(
    medium: *const VmxMedium,
    drive: *const VmxModulation,
    k_rad_um: f64,
    alpha: u32,
    alpha_p: u32,
    out: *mut f64,
) -> VmxStatus {
    guard(|| {
        nonnull!(medium);
        nonnull!(drive);
        nonnull!(out);
        let m = unsafe { &(*medium).0 };
        let raw = unsafe { &*drive };
        let result = modulation_of(raw).and_then(|d| {
            let modes = branch_modes(m, k_rad_um)?;
            g_inter(
                m,
                &modes,
                &d,
                alpha as usize,
                alpha_p as usize,
                &AmplitudeOptions::default(),
            )
        });
        match result {
            Ok(amp) => {
                unsafe { *out = amp.probability() };
                VmxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
