#ifndef TWOVIEW_H
#define TWOVIEW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TvStatus {
  TV_STATUS_OK = 0,
  TV_STATUS_NULL_POINTER = 1,
  TV_STATUS_NON_FINITE = 2,
  TV_STATUS_ZERO_MATRIX = 3,
  TV_STATUS_RANK_DEFICIENT = 4,
  TV_STATUS_FULL_RANK = 5,
  TV_STATUS_TRUNCATION_VIOLATION = 6,
  TV_STATUS_ZERO_POLYNOMIAL = 7,
  TV_STATUS_NO_REAL_CRITICAL_POINT = 8,
  TV_STATUS_INDEX_OUT_OF_RANGE = 9,
  TV_STATUS_INVALID_ARGUMENT = 10,
  TV_STATUS_PANIC = 11,
} TvStatus;

/**
 * Opaque triangulation result.
 */
typedef struct TvResult TvResult;

/**
 * One critical point. Coordinates are image units; `*_im` are zero for
 * real points.
 */
typedef struct TvCriticalPoint {
  double lambda_re;
  double lambda_im;
  double x1_re[2];
  double x1_im[2];
  double x2_re[2];
  double x2_im[2];
  double objective;
  double epipolar_resid;
  double kkt_resid;
  uint32_t multiplicity;
  bool is_real;
  bool degenerate;
} TvCriticalPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Triangulates one correspondence. `f` is a row-major 3×3 matrix, `u1` and
 * `u2` are image points.
 *
 * On `Ok` and on `NoRealCriticalPoint` a handle is stored in `*out` (the
 * latter has no minimizer but still lists every critical point); on other
 * failures `*out` is set to null.
 *
 * # Safety
 * `f` must point to 9 doubles, `u1` and `u2` to 2 doubles each, and `out`
 * must be a valid location for one pointer.
 */
enum TvStatus tv_triangulate(const double *f,
                             const double *u1,
                             const double *u2,
                             struct TvResult **out);

/**
 * Releases a handle from [`tv_triangulate`]. Null is ignored.
 *
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void tv_result_free(struct TvResult *r);

/**
 * Number of reported critical points (distinct roots), 0 for null.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t tv_result_len(const struct TvResult *r);

/**
 * Number of real critical points, 0 for null.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t tv_result_real_count(const struct TvResult *r);

/**
 * Whether the instance has six distinct, simple, non-degenerate points.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
bool tv_result_generic(const struct TvResult *r);

/**
 * Copies critical point `index` (real points first, by objective).
 *
 * # Safety
 * `r` must be null or a live handle; `out` must be null or writable.
 */
enum TvStatus tv_result_point(const struct TvResult *r, size_t index, struct TvCriticalPoint *out);

/**
 * Copies the global minimizer, or returns `NoRealCriticalPoint`.
 *
 * # Safety
 * `r` must be null or a live handle; `out` must be null or writable.
 */
enum TvStatus tv_result_minimizer(const struct TvResult *r, struct TvCriticalPoint *out);

/**
 * Writes the seven ascending coefficients of the multiplier polynomial for
 * the unit-norm, sign-normalized matrix used internally.
 *
 * # Safety
 * `f` must point to 9 doubles, `u1` and `u2` to 2 each, `coeffs` to 7
 * writable doubles.
 */
enum TvStatus tv_build_t(const double *f, const double *u1, const double *u2, double *coeffs);

/**
 * Static, NUL-terminated name of a status code; `"Unknown"` for values
 * outside [`TvStatus`].
 */
const char *tv_status_name(int32_t status);

/**
 * Copies the calling thread's last error detail into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length. Pass a
 * null `buf` to query the length.
 *
 * # Safety
 * `buf` must be null or valid for `len` writes.
 */
size_t tv_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWOVIEW_H */
