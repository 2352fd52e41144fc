#ifndef CRITJAC_H
#define CRITJAC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Kind of absolutely continuous set.
 */
typedef enum CjAcKind {
  CJ_AC_KIND_EMPTY = 0,
  CJ_AC_KIND_WHOLE_LINE = 1,
  /**
   * `(ac_lo, +inf)` or `(-inf, ac_hi)`.
   */
  CJ_AC_KIND_HALF_LINE = 2,
} CjAcKind;

/**
 * Which value of `z` to use when it is real.
 */
typedef enum CjSide {
  CJ_SIDE_INTERIOR = 0,
  /**
   * `λ + i0`.
   */
  CJ_SIDE_PLUS = 1,
  /**
   * `λ - i0`.
   */
  CJ_SIDE_MINUS = 2,
} CjSide;

/**
 * Result codes. The nonzero values split failures the same way as the
 * command-line exit codes, plus codes for misuse of the interface.
 */
typedef enum CjStatus {
  CJ_STATUS_OK = 0,
  CJ_STATUS_NULL_POINTER = 1,
  /**
   * The coefficients fall outside the supported regime.
   */
  CJ_STATUS_REGIME = 2,
  /**
   * A numerical procedure failed (truncation, branch point, unresolved grid).
   */
  CJ_STATUS_NUMERIC = 3,
  /**
   * Bad parameters, or a point outside the operation's domain.
   */
  CJ_STATUS_DOMAIN = 4,
  CJ_STATUS_BUFFER_TOO_SMALL = 5,
  CJ_STATUS_PANIC = 6,
} CjStatus;

/**
 * Opaque model handle: coefficients plus their classification.
 */
typedef struct CjModel CjModel;

typedef struct CjClassification {
  double sigma;
  double gamma;
  double tau;
  double rho;
  double nu;
  double delta;
  size_t depth;
  enum CjAcKind ac_kind;
  double ac_lo;
  double ac_hi;
} CjClassification;

typedef struct CjDensity {
  double lambda;
  double xi;
  double kappa;
  double eta;
  double w;
} CjDensity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *cj_last_error(void);

/**
 * Laguerre model with parameter `p > -1`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum CjStatus cj_model_laguerre(double p, struct CjModel **out);

/**
 * Power model `a_n = n^σ(1 + α/n)`, `b_n = 2γ n^σ(1 + β/n)`, with `a_0 = 1`, `b_0 = 0`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum CjStatus cj_model_power(double sigma,
                             double alpha,
                             double beta,
                             double gamma,
                             struct CjModel **out);

/**
 * Model from a JSON description such as `{"kind": "laguerre", "p": 0.5}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writing one pointer.
 */
enum CjStatus cj_model_from_json(const char *json, struct CjModel **out);

/**
 * Releases a model. NULL is ignored.
 *
 * # Safety
 * `model` must come from one of the constructors and not be used afterwards.
 */
void cj_model_free(struct CjModel *model);

/**
 * # Safety
 * `model` must be a live handle; `out` must be valid for writing.
 */
enum CjStatus cj_classify(const struct CjModel *model, struct CjClassification *out);

/**
 * Spectral density at `lambda`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid for writing.
 */
enum CjStatus cj_density(const struct CjModel *model, double lambda, struct CjDensity *out);

/**
 * Jost function `Ω(z)` at `z = re + i·im`; `side` selects the boundary value for real `z`.
 *
 * # Safety
 * `model` must be a live handle; `out_re`, `out_im` must be valid for writing.
 */
enum CjStatus cj_omega(const struct CjModel *model,
                       double re,
                       double im,
                       enum CjSide side,
                       double *out_re,
                       double *out_im);

/**
 * `P_0(z) .. P_{n_max}(z)` as `ln|P_n|` and `arg P_n`; both buffers hold `n_max + 1` entries.
 *
 * # Safety
 * `model` must be a live handle; the buffers must be valid for `n_max + 1` writes.
 */
enum CjStatus cj_poly_eval(const struct CjModel *model,
                           double re,
                           double im,
                           size_t n_max,
                           double *log_abs,
                           double *phase);

/**
 * Eigenvalues in `[lo, hi]`. `count` receives the number found; if it
 * exceeds `capacity` only the first `capacity` are written and
 * `CJ_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid for `capacity` writes; `count` for one.
 */
enum CjStatus cj_eigenvalues(const struct CjModel *model,
                             double lo,
                             double hi,
                             double *out,
                             size_t capacity,
                             size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRITJAC_H */
