#ifndef SKSPLINE_H
#define SKSPLINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NULL_POINTER = 1,
  SK_STATUS_INVALID_ARGUMENT = 2,
  SK_STATUS_DOMAIN = 3,
  SK_STATUS_HYPOTHESIS = 4,
  SK_STATUS_SINGULAR_KERNEL = 5,
  SK_STATUS_NUMERICAL_RANK = 6,
  SK_STATUS_IO = 7,
  SK_STATUS_PANIC = 8,
} SkStatus;

typedef enum SkNorm {
  SK_NORM_L2 = 0,
  SK_NORM_LINF = 1,
} SkNorm;

typedef struct SkFundamental SkFundamental;

typedef struct SkInterpolant SkInterpolant;

typedef struct SkKernel SkKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sk_last_error(void);

/**
 * Creates the power-law kernel `sum_{l != 0} |l|^{-gamma} e^{i l.x}`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SkStatus sk_kernel_new(size_t d, double gamma, enum SkNorm norm, struct SkKernel **out);

/**
 * # Safety
 * `kernel` must come from [`sk_kernel_new`] and not be used afterwards.
 */
void sk_kernel_free(struct SkKernel *kernel);

/**
 * `K(x)` for `x` of length `len == d`.
 *
 * # Safety
 * Pointers must be valid; `x` must hold `len` values.
 */
enum SkStatus sk_kernel_eval(const struct SkKernel *kernel,
                             const double *x,
                             size_t len,
                             double *out);

/**
 * Builds the fundamental spline on the grid with degrees `n[0..d]`.
 *
 * # Safety
 * `n` must hold `d` values and `out` must be valid for writes.
 */
enum SkStatus sk_fundamental_new(const struct SkKernel *kernel,
                                 const size_t *n,
                                 size_t d,
                                 double tol,
                                 struct SkFundamental **out);

/**
 * # Safety
 * `fs` must come from [`sk_fundamental_new`] and not be used afterwards.
 */
void sk_fundamental_free(struct SkFundamental *fs);

/**
 * Number of knots `N`, or 0 for a null handle.
 *
 * # Safety
 * `fs` must be null or a live handle.
 */
size_t sk_fundamental_knot_count(const struct SkFundamental *fs);

/**
 * # Safety
 * Pointers must be valid; `x` must hold `len` values.
 */
enum SkStatus sk_fundamental_eval(const struct SkFundamental *fs,
                                  const double *x,
                                  size_t len,
                                  double *out);

/**
 * Interpolates `len == N` knot samples given in lexicographic knot order.
 *
 * # Safety
 * `samples` must hold `len` values and `out` must be valid for writes.
 */
enum SkStatus sk_interpolant_new(const struct SkFundamental *fs,
                                 const double *samples,
                                 size_t len,
                                 struct SkInterpolant **out);

/**
 * # Safety
 * `ip` must come from [`sk_interpolant_new`] and not be used afterwards.
 */
void sk_interpolant_free(struct SkInterpolant *ip);

/**
 * # Safety
 * Pointers must be valid; `x` must hold `len` values.
 */
enum SkStatus sk_interpolant_eval(const struct SkInterpolant *ip,
                                  const double *x,
                                  size_t len,
                                  double *out);

/**
 * Predicted rate `-gamma + d (1/p - 1/q)`; pass `q = INFINITY` for the sup norm.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SkStatus sk_rate_exponent(double p, double q, double gamma, size_t d, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKSPLINE_H */
