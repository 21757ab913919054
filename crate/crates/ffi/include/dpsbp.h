#ifndef DPSBP_H
#define DPSBP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DpsbpFamily {
  DPSBP_FAMILY_FD_UPWIND = 0,
  DPSBP_FAMILY_FD_DRP = 1,
  DPSBP_FAMILY_DG_LGL = 2,
} DpsbpFamily;

typedef enum DpsbpStatus {
  DPSBP_STATUS_OK = 0,
  DPSBP_STATUS_NULL_POINTER = 1,
  DPSBP_STATUS_INVALID_ARGUMENT = 2,
  DPSBP_STATUS_UNSUPPORTED_ORDER = 3,
  DPSBP_STATUS_TOO_FEW_NODES = 4,
  DPSBP_STATUS_BUFFER_TOO_SMALL = 5,
  DPSBP_STATUS_NO_CONVERGENCE = 6,
  DPSBP_STATUS_NON_FINITE = 7,
  DPSBP_STATUS_PANIC = 8,
  DPSBP_STATUS_INTERNAL = 9,
} DpsbpStatus;

/**
 * Periodic multi-block operator on `[0, length]`.
 */
typedef struct DpsbpOperator DpsbpOperator;

/**
 * Residuals of the four operator axioms for one element.
 */
typedef struct DpsbpAuditReport {
  double a1_min_h;
  double a1_sum_error;
  double a2_residual;
  double a3_residual;
  double a4_max_quadratic;
  /**
   * 1 when every axiom holds.
   */
  int32_t pass;
} DpsbpAuditReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dpsbp_version(void);

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `capacity`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `capacity` bytes.
 */
size_t dpsbp_last_error(char *buf, size_t capacity);

/**
 * Build a periodic operator of `elements` equal elements on `[0, length]`.
 * `family_code` is a [`DpsbpFamily`] value. `nodes` is per element and
 * ignored for DG, which uses `order + 1`.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum DpsbpStatus dpsbp_operator_new(int32_t family_code,
                                    size_t order,
                                    size_t nodes,
                                    size_t elements,
                                    double length,
                                    double dg_strength,
                                    struct DpsbpOperator **out);

/**
 * Release an operator. Null is ignored.
 *
 * # Safety
 * `op` must come from [`dpsbp_operator_new`] and not be used afterwards.
 */
void dpsbp_operator_free(struct DpsbpOperator *op);

/**
 * Total number of nodes.
 *
 * # Safety
 * `op` must be a live handle, `out` valid for one write.
 */
enum DpsbpStatus dpsbp_operator_size(const struct DpsbpOperator *op, size_t *out);

/**
 * Node coordinates, element by element.
 *
 * # Safety
 * `out` must be valid for `capacity` doubles.
 */
enum DpsbpStatus dpsbp_operator_nodes(const struct DpsbpOperator *op, double *out, size_t capacity);

/**
 * Quadrature weights of the global norm `H`.
 *
 * # Safety
 * `out` must be valid for `capacity` doubles.
 */
enum DpsbpStatus dpsbp_operator_weights(const struct DpsbpOperator *op,
                                        double *out,
                                        size_t capacity);

/**
 * Apply the penalized central derivative `D~ = (D~+ + D~-)/2`.
 *
 * # Safety
 * `u` and `out` must each be valid for `len` doubles.
 */
enum DpsbpStatus dpsbp_operator_apply_d(const struct DpsbpOperator *op,
                                        const double *u,
                                        size_t len,
                                        double *out);

/**
 * Audit one element of `nodes` points on `[0, 1]` against the operator axioms.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum DpsbpStatus dpsbp_audit(int32_t family_code,
                             size_t order,
                             size_t nodes,
                             double dg_strength,
                             size_t trials,
                             uint64_t seed,
                             struct DpsbpAuditReport *out);

/**
 * Volume upwind parameter `γ_opt` for split parameter `alpha` and base flow `u`.
 *
 * # Safety
 * `u` must be valid for `len` doubles, `out` for one write.
 */
enum DpsbpStatus dpsbp_burgers_gamma_opt(const struct DpsbpOperator *op,
                                         double alpha,
                                         const double *u,
                                         size_t len,
                                         double *out);

/**
 * Largest real part of the spectrum of the Burgers scheme linearized at `u`.
 *
 * # Safety
 * `u` must be valid for `len` doubles, `out` for one write.
 */
enum DpsbpStatus dpsbp_burgers_max_re(const struct DpsbpOperator *op,
                                      double alpha,
                                      double gamma,
                                      const double *u,
                                      size_t len,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPSBP_H */
