/* C interface for the vacmix vacuum pair emission library. */

#ifndef VACMIX_H
#define VACMIX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every library call.
 */
typedef enum VmxStatus {
  /**
   * Success; output pointers are valid.
   */
  VMX_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  VMX_STATUS_NULL_ARG = 1,
  /**
   * Invalid parameters (bad resonance data, indices, drive values).
   */
  VMX_STATUS_INVALID_CONFIG = 2,
  /**
   * A numeric routine failed (degenerate branches, pole hit, no root).
   */
  VMX_STATUS_NUMERIC = 3,
  /**
   * An output buffer was too small; the required size was written.
   */
  VMX_STATUS_BUFFER_TOO_SMALL = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  VMX_STATUS_PANIC = 5,
} VmxStatus;

/**
 * Opaque handle to a dispersive medium.
 */
typedef struct VmxMedium VmxMedium;

/**
 * Two-tone Gaussian drive parameters, plain data.
 */
typedef struct VmxModulation {
  /**
   * Index of the driven resonance (0-based, ascending in frequency).
   */
  uint32_t resonance_index;
  /**
   * Fractional modulation depth per tone.
   */
  double eps;
  /**
   * First tone frequency (rad/um).
   */
  double nu1_rad_um;
  /**
   * Second tone frequency (rad/um).
   */
  double nu2_rad_um;
  /**
   * Gaussian window width (um of optical path).
   */
  double tau_um;
} VmxModulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message of the calling thread into `buf`
 * as a NUL-terminated C string, truncating if needed. Returns the full
 * length of the message including the NUL; call with a null `buf` or
 * zero `capacity` to query the required size. Never fails.
 *
 * # Safety
 *
 * `buf` must be null or point to at least `capacity` writable bytes.
 */
size_t vmx_last_error_message(char *buf, size_t capacity);

/**
 * Creates the built-in fused-silica medium. On success writes a handle
 * that must be released with `vmx_medium_free`.
 *
 * # Safety
 *
 * `out` must be null or point to a writable handle slot.
 */
enum VmxStatus vmx_medium_fused_silica(struct VmxMedium **out);

/**
 * Creates a medium from `terms` Sellmeier pairs (B_i, lambda_i in um).
 * On success writes a handle that must be released with
 * `vmx_medium_free`.
 *
 * # Safety
 *
 * `b` and `lambda_um` must be null or point to `terms` readable doubles
 * each; `out` must be null or point to a writable handle slot.
 */
enum VmxStatus vmx_medium_from_sellmeier(const double *b,
                                         const double *lambda_um,
                                         size_t terms,
                                         struct VmxMedium **out);

/**
 * Releases a medium handle. Null is ignored.
 *
 * # Safety
 *
 * `medium` must be null or a handle from a constructor of this library
 * that has not been freed yet.
 */
void vmx_medium_free(struct VmxMedium *medium);

/**
 * Writes the number of polariton branches (resonances + 1).
 *
 * # Safety
 *
 * `medium` must be null or a live handle; `out` must be null or point
 * to a writable `size_t`.
 */
enum VmxStatus vmx_branch_count(const struct VmxMedium *medium, size_t *out);

/**
 * Writes the refractive index n(omega) on the propagating window.
 *
 * # Safety
 *
 * `medium` must be null or a live handle; `out` must be null or point
 * to a writable double.
 */
enum VmxStatus vmx_refractive_index(const struct VmxMedium *medium,
                                    double omega_rad_um,
                                    double *out);

/**
 * Writes the branch frequencies at `k` in ascending order. `written`
 * always receives the branch count; `BufferTooSmall` is returned when
 * `capacity` is below it.
 *
 * # Safety
 *
 * `medium` must be null or a live handle; `out` must be null or point
 * to `capacity` writable doubles; `written` must be null or point to a
 * writable `size_t`.
 */
enum VmxStatus vmx_branch_frequencies(const struct VmxMedium *medium,
                                      double k_rad_um,
                                      double *out,
                                      size_t capacity,
                                      size_t *written);

/**
 * Writes the photonic Hopfield weights per branch at `k`, each in
 * [0, 1]. Buffer semantics as in `vmx_branch_frequencies`.
 *
 * # Safety
 *
 * As `vmx_branch_frequencies`.
 */
enum VmxStatus vmx_hopfield_weights(const struct VmxMedium *medium,
                                    double k_rad_um,
                                    double *out,
                                    size_t capacity,
                                    size_t *written);

/**
 * Writes the reference drive for `medium`: resonance 1 driven at
 * Omega_m/5 and Omega_m/6 over a 100 fs FWHM window with the strength
 * of a 1e-3 index shift at 0.65 um.
 *
 * # Safety
 *
 * `medium` must be null or a live handle; `out` must be null or point
 * to a writable `VmxModulation`.
 */
enum VmxStatus vmx_reference_modulation(const struct VmxMedium *medium, struct VmxModulation *out);

/**
 * Writes the pair emission probability |G|^2 for two quanta on branch
 * `alpha` at wavenumber `k`, using the resolved-tone mixing route
 * without the subleading correction.
 *
 * # Safety
 *
 * `medium` must be null or a live handle; `drive` must be null or point
 * to a readable `VmxModulation`; `out` must be null or point to a
 * writable double.
 */
enum VmxStatus vmx_pair_probability_intra(const struct VmxMedium *medium,
                                          const struct VmxModulation *drive,
                                          double k_rad_um,
                                          uint32_t alpha,
                                          double *out);

/**
 * Writes the pair emission probability |G|^2 for one quantum on branch
 * `alpha` and one on `alpha_p` at wavenumber `k`. The branches must be
 * distinct.
 *
 * # Safety
 *
 * As `vmx_pair_probability_intra`.
 */
enum VmxStatus vmx_pair_probability_inter(const struct VmxMedium *medium,
                                          const struct VmxModulation *drive,
                                          double k_rad_um,
                                          uint32_t alpha,
                                          uint32_t alpha_p,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VACMIX_H */
