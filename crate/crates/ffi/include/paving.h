#ifndef PAVING_H
#define PAVING_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum PavingStatus {
  PAVING_STATUS_OK = 0,
  PAVING_STATUS_NULL_POINTER = 1,
  PAVING_STATUS_INVALID_ARGUMENT = 2,
  PAVING_STATUS_CAP_EXCEEDED = 3,
  PAVING_STATUS_NUMERICAL = 4,
  PAVING_STATUS_DEGENERATE = 5,
  PAVING_STATUS_PANIC = 6,
} PavingStatus;

/**
 * Opaque projection handle.
 */
typedef struct PavingProjection PavingProjection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *paving_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *paving_last_error(void);

/**
 * Seeded random rank-`rank` projection on `R^n`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum PavingStatus paving_projection_random(size_t n,
                                           size_t rank,
                                           uint64_t seed,
                                           struct PavingProjection **out);

/**
 * Projection onto the span of `rank` orthonormal rows of length `n`, given
 * row-major in `rows` (`rank * n` doubles).
 *
 * # Safety
 * `rows` must point to `rank * n` readable doubles (may be null when that is 0);
 * `out` must be valid for one handle.
 */
enum PavingStatus paving_projection_from_rows(const double *rows,
                                              size_t rank,
                                              size_t n,
                                              struct PavingProjection **out);

/**
 * Floating projection of the explicit counterexample for parameter `m`.
 *
 * # Safety
 * `out` must be valid for one handle.
 */
enum PavingStatus paving_projection_weaver(uint32_t m, struct PavingProjection **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from one of the constructors above and not be freed twice.
 */
void paving_projection_free(struct PavingProjection *p);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t paving_projection_dim(const struct PavingProjection *p);

/**
 * Rank, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t paving_projection_rank(const struct PavingProjection *p);

/**
 * Largest diagonal entry of the projection.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum PavingStatus paving_delta_p(const struct PavingProjection *p, double *out);

/**
 * `||p s p||` for a `+1`/`-1` sign vector of length `dim`.
 *
 * # Safety
 * `p` live; `signs` readable for `len` bytes; `out` writable.
 */
enum PavingStatus paving_psp_norm(const struct PavingProjection *p,
                                  const int8_t *signs,
                                  size_t len,
                                  double *out);

/**
 * Exhaustive `min_s ||p s p||`; refuses dimensions above `max_n`.
 * The minimizing signs are written to `out_signs` (length `dim`).
 *
 * # Safety
 * `p` live; `out_norm` writable; `out_signs` writable for `signs_len` bytes.
 */
enum PavingStatus paving_brute_force_min(const struct PavingProjection *p,
                                         size_t max_n,
                                         double *out_norm,
                                         int8_t *out_signs,
                                         size_t signs_len);

/**
 * Single-vector symmetry for `v` (length `dim`): writes the signs, the
 * achieved `||p s p v||` for the normalized `p(v)`, and the bound
 * `sqrt(2 delta_p + 3 delta_p^2)`.
 *
 * # Safety
 * `p` live; `v` readable for `len` doubles; outputs writable.
 */
enum PavingStatus paving_theorem1(const struct PavingProjection *p,
                                  const double *v,
                                  size_t len,
                                  int8_t *out_signs,
                                  size_t signs_len,
                                  double *out_norm,
                                  double *out_bound);

/**
 * Exact certificate for parameter `m` as a JSON document; free with
 * `paving_string_free`.
 *
 * # Safety
 * `out_json` must be writable.
 */
enum PavingStatus paving_weaver_certificate_json(uint32_t m, char **out_json);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void paving_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAVING_H */
