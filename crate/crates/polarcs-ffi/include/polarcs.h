/*
 * C interface to the polarcs library: polarizing linear transforms over
 * the reals, the sparse-recovery measurement systems they induce, and a
 * quantization-based information-dimension estimator.
 *
 * All functions returning `polarcs_status` report POLARCS_OK on success.
 * On failure, `polarcs_last_error_message()` describes the most recent
 * error on the calling thread. Out-parameters are written only on
 * POLARCS_OK (except where documented). Handles are freed exactly once
 * with their matching `_free` function; passing NULL to `_free` is a
 * no-op.
 */

#ifndef POLARCS_H
#define POLARCS_H

/* Generated from the polarcs-ffi crate sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this interface.
 */
typedef enum {
  /**
   * The call succeeded and all out-parameters are valid.
   */
  POLARCS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  POLARCS_NULL_POINTER = 1,
  /**
   * A scalar argument is outside its documented domain.
   */
  POLARCS_INVALID_PARAMETER = 2,
  /**
   * A buffer length disagrees with the handle's dimensions.
   */
  POLARCS_DIMENSION_MISMATCH = 3,
  /**
   * The request exceeds a built-in size cap (e.g. dense depth limits).
   */
  POLARCS_SIZE_LIMIT = 4,
  /**
   * The input is numerically degenerate for the requested operation.
   */
  POLARCS_DEGENERATE_INPUT = 5,
  /**
   * The decoder ran but did not certify a successful recovery.
   */
  POLARCS_DECODE_FAILED = 6,
  /**
   * An internal invariant failed; the library state is still sound.
   */
  POLARCS_INTERNAL_ERROR = 7,
} polarcs_status;

/**
 * Sparse-recovery algorithm selector for [`polarcs_system_recover`].
 */
typedef enum {
  /**
   * Convex relaxation (interior point); scales to large blocks.
   */
  POLARCS_METHOD_L1 = 0,
  /**
   * Exhaustive smallest-support search; exact, desk-scale only.
   */
  POLARCS_METHOD_L0 = 1,
} polarcs_method;

/**
 * Measurement system handle (opaque): the transform-derived coding matrix
 * together with its annihilating measurement matrix.
 */
typedef struct polarcs_system polarcs_system;

/**
 * Polarizing linear transform handle (opaque).
 */
typedef struct polarcs_transform polarcs_transform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never NULL.
 */
const char *polarcs_version(void);

/**
 * Message for the most recent failure on the calling thread. The pointer
 * stays valid until the next failing call on the same thread; never NULL.
 */
const char *polarcs_last_error_message(void);

/**
 * Create a depth-`n` transform over blocks of `2^n` coordinates with
 * kernel weight `beta`. On success `*out` owns the handle.
 *
 * # Safety
 * `out` must point to a writable `polarcs_transform*` slot.
 */
polarcs_status polarcs_transform_new(uint32_t n, double beta, polarcs_transform **out);

/**
 * Destroy a transform handle. NULL is a no-op.
 *
 * # Safety
 * `t` must be NULL or a handle from `polarcs_transform_new` not yet freed.
 */
void polarcs_transform_free(polarcs_transform *t);

/**
 * Block size `2^n` of the transform; 0 if the handle is NULL.
 *
 * # Safety
 * `t` must be NULL or a live transform handle.
 */
size_t polarcs_transform_size(const polarcs_transform *t);

/**
 * Recursion depth `n` of the transform; 0 if the handle is NULL.
 *
 * # Safety
 * `t` must be NULL or a live transform handle.
 */
uint32_t polarcs_transform_depth(const polarcs_transform *t);

/**
 * Single matrix entry `(i, j)`; exact in powers of the kernel weight.
 *
 * # Safety
 * `t` must be a live transform handle; `out` must point to a writable double.
 */
polarcs_status polarcs_transform_entry(const polarcs_transform *t, size_t i, size_t j, double *out);

/**
 * Apply the transform: `y = H x`. Both buffers hold `len` doubles and
 * `len` must equal the block size. Runs in `O(len log len)`.
 *
 * # Safety
 * `t` must be a live transform handle; `x` and `y` must be valid for `len` doubles each.
 */
polarcs_status polarcs_transform_apply(const polarcs_transform *t,
                                       const double *x,
                                       size_t len,
                                       double *y);

/**
 * Per-coordinate dimension profile at depth `n` and noise sparsity `p`.
 * `out` must hold `2^n` doubles; values arrive in natural index order.
 *
 * # Safety
 * `out` must be valid for `2^n` doubles.
 */
polarcs_status polarcs_mid_profile(uint32_t n, double p, double *out);

/**
 * Build the measurement system for block size `2^n`, kernel weight
 * `beta`, design sparsity `p`, and signal dimension `dim` (the number of
 * retained columns). On success `*out` owns the handle.
 *
 * # Safety
 * `out` must point to a writable `polarcs_system*` slot.
 */
polarcs_status polarcs_system_new(uint32_t n,
                                  double beta,
                                  double p,
                                  size_t dim,
                                  polarcs_system **out);

/**
 * Destroy a system handle. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or a handle from `polarcs_system_new` not yet freed.
 */
void polarcs_system_free(polarcs_system *s);

/**
 * Block size M; 0 if the handle is NULL.
 *
 * # Safety
 * `s` must be NULL or a live system handle.
 */
size_t polarcs_system_block_size(const polarcs_system *s);

/**
 * Signal dimension N (retained columns); 0 if the handle is NULL.
 *
 * # Safety
 * `s` must be NULL or a live system handle.
 */
size_t polarcs_system_dimension(const polarcs_system *s);

/**
 * Number of measurement rows R = M - N; 0 if the handle is NULL.
 *
 * # Safety
 * `s` must be NULL or a live system handle.
 */
size_t polarcs_system_measurement_count(const polarcs_system *s);

/**
 * Copy the measurement matrix F, row-major, into `out`
 * (`measurement_count * block_size` doubles).
 *
 * # Safety
 * `s` must be a live system handle; `out` must be valid for `measurement_count * block_size` doubles.
 */
polarcs_status polarcs_system_measurement_matrix(const polarcs_system *s,
                                                 double *out);

/**
 * Copy the coding matrix A, row-major, into `out`
 * (`block_size * dimension` doubles).
 *
 * # Safety
 * `s` must be a live system handle; `out` must be valid for `block_size * dimension` doubles.
 */
polarcs_status polarcs_system_coding_matrix(const polarcs_system *s, double *out);

/**
 * Compress: `y' = F e`. `e` holds `e_len == block_size` doubles; `y_out`
 * holds `measurement_count` doubles.
 *
 * # Safety
 * `s` must be a live system handle; `e` must be valid for `e_len` doubles and `y_out` for `measurement_count` doubles.
 */
polarcs_status polarcs_system_measure(const polarcs_system *s,
                                      const double *e,
                                      size_t e_len,
                                      double *y_out);

/**
 * Recover the sparse vector behind measurements `y` (`y_len ==
 * measurement_count` doubles). Writes `block_size` doubles to `e_out` on
 * success; returns `POLARCS_DECODE_FAILED` when the decoder finishes
 * without certifying a recovery.
 *
 * # Safety
 * `s` must be a live system handle; `y` must be valid for `y_len` doubles and `e_out` for `block_size` doubles.
 */
polarcs_status polarcs_system_recover(const polarcs_system *s,
                                      const double *y,
                                      size_t y_len,
                                      polarcs_method method,
                                      double *e_out);

/**
 * Information-dimension estimate of a scalar sample set at mesh
 * resolution `levels`, clipping samples to `[-clip, clip]`. Writes the
 * estimate and a saturation flag (nonzero when the mesh is too fine for
 * the sample budget and the estimate should not be trusted).
 *
 * # Safety
 * `samples` must be valid for `len` doubles; `dim_out` and `saturated_out` must be writable.
 */
polarcs_status polarcs_estimate_dim(const double *samples,
                                    size_t len,
                                    uint32_t levels,
                                    double clip,
                                    double *dim_out,
                                    int32_t *saturated_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARCS_H */
