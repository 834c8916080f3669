#ifndef SUBPROB_H
#define SUBPROB_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `Ok` is zero; everything else is a failure.
 */
typedef enum SubprobStatus {
  SUBPROB_STATUS_OK = 0,
  SUBPROB_STATUS_NULL_POINTER = 1,
  SUBPROB_STATUS_INVALID_INPUT = 2,
  SUBPROB_STATUS_NO_CONVERGENCE = 3,
  SUBPROB_STATUS_SINGULAR = 4,
  SUBPROB_STATUS_NUMERICAL_FAILURE = 5,
  SUBPROB_STATUS_UNSUPPORTED_EXPONENT = 6,
  SUBPROB_STATUS_OUT_OF_RANGE = 7,
  SUBPROB_STATUS_BUFFER_TOO_SMALL = 8,
  SUBPROB_STATUS_NOT_FOUND = 9,
  SUBPROB_STATUS_PANIC = 10,
} SubprobStatus;

/**
 * How a stationary point was classified.
 */
typedef enum SubprobClassification {
  SUBPROB_CLASSIFICATION_GLOBAL = 0,
  SUBPROB_CLASSIFICATION_LOCAL_NON_GLOBAL = 1,
  SUBPROB_CLASSIFICATION_NOT_LOCAL_MIN = 2,
} SubprobClassification;

/**
 * Opaque list of classified stationary points.
 */
typedef struct SubprobSolution SubprobSolution;

/**
 * Scalar data for one stationary point. For trust-region problems
 * `multiplier` is λ; for regularized problems it is `t = ‖x‖^(p-2)`.
 */
typedef struct SubprobPointInfo {
  double multiplier;
  double objective;
  double norm;
  enum SubprobClassification classification;
  /**
   * Nonzero when the point is one of infinitely many with this multiplier.
   */
  int32_t continuum;
} SubprobPointInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Enumerates and classifies the KKT points of
 * `min ½xᵀQx + cᵀx` subject to `‖x‖ ≤ 1`.
 *
 * # Safety
 * `q` must point to `n * n` doubles, `c` to `n` doubles, and `out` to
 * writable storage for one pointer.
 */
enum SubprobStatus subprob_trs_solve(const double *q,
                                     const double *c,
                                     size_t n,
                                     double tol,
                                     struct SubprobSolution **out);

/**
 * Enumerates and classifies the critical points of
 * `½xᵀQx + cᵀx + (σ/p)‖x‖^p` for `p > 2`, `σ > 0`.
 *
 * # Safety
 * Same requirements as [`subprob_trs_solve`].
 */
enum SubprobStatus subprob_prs_solve(const double *q,
                                     const double *c,
                                     size_t n,
                                     double sigma,
                                     double p,
                                     double tol,
                                     struct SubprobSolution **out);

/**
 * Releases a solution. Null is ignored.
 *
 * # Safety
 * `sol` must come from a solve call and not have been freed.
 */
void subprob_solution_free(struct SubprobSolution *sol);

/**
 * Number of stationary points, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t subprob_solution_len(const struct SubprobSolution *sol);

/**
 * Dimension of each point, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t subprob_solution_dim(const struct SubprobSolution *sol);

/**
 * Index of the global minimizer.
 *
 * # Safety
 * `sol` must be a live handle and `index` writable.
 */
enum SubprobStatus subprob_solution_global(const struct SubprobSolution *sol, size_t *index);

/**
 * Index of the local nonglobal minimizer; `NotFound` when there is none.
 *
 * # Safety
 * `sol` must be a live handle and `index` writable.
 */
enum SubprobStatus subprob_solution_local_nonglobal(const struct SubprobSolution *sol,
                                                    size_t *index);

/**
 * Scalar data of point `index`.
 *
 * # Safety
 * `sol` must be a live handle and `info` writable.
 */
enum SubprobStatus subprob_solution_point(const struct SubprobSolution *sol,
                                          size_t index,
                                          struct SubprobPointInfo *info);

/**
 * Copies the coordinates of point `index` into `x`, which holds `len`
 * doubles.
 *
 * # Safety
 * `sol` must be a live handle and `x` must point to `len` writable doubles.
 */
enum SubprobStatus subprob_solution_point_x(const struct SubprobSolution *sol,
                                            size_t index,
                                            double *x,
                                            size_t len);

/**
 * Real generalized eigenvalues of the trust-region pencil, in
 * ascending order. On `Ok` or `BufferTooSmall`, `count` holds the number
 * of eigenvalues; only `min(count, len)` are written.
 *
 * # Safety
 * `q`, `c` as in [`subprob_trs_solve`]; `values` must hold `len` doubles
 * (may be null when `len` is 0); `count` must be writable.
 */
enum SubprobStatus subprob_trs_pencil_eigenvalues(const double *q,
                                                  const double *c,
                                                  size_t n,
                                                  double tol,
                                                  double *values,
                                                  size_t len,
                                                  size_t *count);

/**
 * Message for the most recent failure on this thread, or null. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *subprob_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *subprob_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBPROB_H */
