#ifndef AKR_H
#define AKR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum AkrStatus {
  AKR_STATUS_OK = 0,
  /**
   * Malformed expression, unknown name or invalid UTF-8.
   */
  AKR_STATUS_INPUT_ERROR = 1,
  /**
   * A precondition failed, e.g. `n < j` or a point outside the unit square.
   */
  AKR_STATUS_PRECONDITION_ERROR = 2,
  /**
   * A numerical procedure failed.
   */
  AKR_STATUS_NUMERICAL_ERROR = 3,
  AKR_STATUS_NULL_POINTER = 4,
  /**
   * The output buffer is shorter than required.
   */
  AKR_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * Internal panic caught at the boundary.
   */
  AKR_STATUS_PANIC = 6,
} AkrStatus;

typedef enum AkrOperatorKind {
  AKR_OPERATOR_KIND_BERNSTEIN = 0,
  AKR_OPERATOR_KIND_AKR = 1,
} AkrOperatorKind;

typedef enum AkrNorm {
  AKR_NORM_SUP = 0,
  /**
   * Discrete relative 2-norm.
   */
  AKR_NORM_REL2 = 1,
} AkrNorm;

typedef enum AkrClass {
  /**
   * `f' >= 0` and `x f'' - (j-1) f' >= 0`.
   */
  AKR_CLASS_KJ1 = 0,
  /**
   * The `Kj1` conditions on every axis slice.
   */
  AKR_CLASS_KJ2 = 1,
  /**
   * `f' <= 0` and `f'' >= 0`.
   */
  AKR_CLASS_DECREASING_CONVEX = 2,
} AkrClass;

typedef enum AkrVerdict {
  AKR_VERDICT_MEMBER = 0,
  AKR_VERDICT_NON_MEMBER = 1,
  AKR_VERDICT_INCONCLUSIVE = 2,
} AkrVerdict;

typedef enum AkrChain {
  /**
   * `f <= B_{n,j} f <= B_n f`
   */
  AKR_CHAIN_AKR_BELOW = 0,
  /**
   * `B_{n,j} f >= B_n f >= f`
   */
  AKR_CHAIN_AKR_ABOVE = 1,
  /**
   * `f <= B_{n,m,j} f <= B_{n,m} f`
   */
  AKR_CHAIN_BIVARIATE = 2,
} AkrChain;

/**
 * A univariate or bivariate function.
 */
typedef struct AkrFunction AkrFunction;

/**
 * Operator selection. `m == 0` means univariate; `j` is ignored for Bernstein.
 */
typedef struct AkrOperator {
  enum AkrOperatorKind kind;
  size_t n;
  size_t m;
  uint32_t j;
} AkrOperator;

/**
 * Summary of a class test; `witness_y` is NaN for univariate tests.
 */
typedef struct AkrClassReport {
  enum AkrVerdict verdict;
  double min_margin;
  double witness_x;
  double witness_y;
  double tolerance;
  size_t points_scanned;
} AkrClassReport;

/**
 * Result of an inequality-chain check: one margin per link.
 */
typedef struct AkrChainReport {
  bool holds;
  double lower_margin;
  double upper_margin;
} AkrChainReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *akr_last_error(void);

/**
 * Library version as a NUL-terminated string with static lifetime.
 */
const char *akr_version(void);

/**
 * Parses an expression in `x` (and `y`). With `force_2d` the result is
 * bivariate even if `y` does not occur.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AkrStatus akr_function_parse(const char *src, bool force_2d, struct AkrFunction **out);

/**
 * Looks up a built-in example function (`ex3.1`, ..., `ex4.6`).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AkrStatus akr_function_catalog(const char *name, uint32_t j, struct AkrFunction **out);

/**
 * Switches the derivative channels of `f` to finite differences, in place.
 *
 * # Safety
 * `f` must be a handle returned by this library and not yet freed.
 */
enum AkrStatus akr_function_use_finite_differences(struct AkrFunction *f);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `f` must be NULL or a handle returned by this library and not yet freed.
 */
void akr_function_free(struct AkrFunction *f);

/**
 * 1 or 2 for a valid handle, 0 for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
uint8_t akr_function_dims(const struct AkrFunction *f);

/**
 * Value of `f` at `(x, y)`; `y` is ignored for univariate functions.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum AkrStatus akr_function_value(const struct AkrFunction *f, double x, double y, double *out);

/**
 * Writes the `n + 1` AKR nodes `t_{n,k}^j` into `out`.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum AkrStatus akr_nodes(size_t n, uint32_t j, double *out, size_t len);

/**
 * Writes the `n + 1` Bernstein basis values `p_{n,k}(x)` into `out`.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum AkrStatus akr_bernstein_basis(size_t n, double x, double *out, size_t len);

/**
 * Evaluates the operator image of `f` at `count` points. `ys` is read only
 * for bivariate operators and may be NULL otherwise.
 *
 * # Safety
 * `f` must be a live handle, `op` valid, and `xs`, `ys`, `out` must point to
 * `count` doubles each (`ys` only when used).
 */
enum AkrStatus akr_eval(const struct AkrFunction *f,
                        const struct AkrOperator *op,
                        const double *xs,
                        const double *ys,
                        size_t count,
                        double *out);

/**
 * Error of the operator on a uniform grid with `points` per axis.
 *
 * # Safety
 * `f` must be a live handle, `op` and `out` valid pointers.
 */
enum AkrStatus akr_error(const struct AkrFunction *f,
                         const struct AkrOperator *op,
                         size_t points,
                         enum AkrNorm norm,
                         double *out);

/**
 * Tests class membership on a uniform grid; `tol <= 0` selects the
 * function's default tolerance.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum AkrStatus akr_check_class(const struct AkrFunction *f,
                               enum AkrClass class_,
                               uint32_t j,
                               size_t points,
                               double tol,
                               struct AkrClassReport *out);

/**
 * Checks an inequality chain between `f`, the AKR and the Bernstein
 * operator; `m` is ignored for univariate chains.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum AkrStatus akr_check_chain(const struct AkrFunction *f,
                               enum AkrChain chain,
                               size_t n,
                               size_t m,
                               uint32_t j,
                               size_t points,
                               double tol,
                               struct AkrChainReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AKR_H */
