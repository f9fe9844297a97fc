/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef JSRCERT_H
#define JSRCERT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum JsrcertStatus {
  JSRCERT_STATUS_OK = 0,
  JSRCERT_STATUS_NULL_POINTER = 1,
  JSRCERT_STATUS_INVALID_ARGUMENT = 2,
  JSRCERT_STATUS_DIMENSION = 3,
  // Singular Gram matrix, degenerate pair or undecided inner solve.
  JSRCERT_STATUS_NUMERICAL = 4,
  JSRCERT_STATUS_BUDGET = 5,
  JSRCERT_STATUS_INFEASIBLE = 6,
  JSRCERT_STATUS_IO = 7,
  JSRCERT_STATUS_FORMAT = 8,
  JSRCERT_STATUS_PANIC = 9,
} JsrcertStatus;

// Stability verdict of a certification report.
typedef enum JsrcertVerdict {
  JSRCERT_VERDICT_CERTIFIED_STABLE = 0,
  JSRCERT_VERDICT_INCONCLUSIVE = 1,
} JsrcertVerdict;

// Opaque scenario certificate with the pair statistics it was built from.
typedef struct JsrcertCertificate JsrcertCertificate;

// Opaque set of sampled output trajectories.
typedef struct JsrcertSamples JsrcertSamples;

// Opaque switched linear system.
typedef struct JsrcertSystem JsrcertSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call on the same thread.
const char *jsrcert_last_error_message(void);

// Library version as a static nul-terminated string.
const char *jsrcert_version(void);

// Builds a system from row-major matrices: `a` holds `modes` blocks of
// `n*n` values, `c` holds `modes` blocks of `p*n` values.
//
// # Safety
// `a` and `c` must point to that many doubles; `out` must be writable.
enum JsrcertStatus jsrcert_system_new(size_t n,
                                      size_t modes,
                                      size_t p,
                                      const double *a,
                                      const double *c,
                                      struct JsrcertSystem **out);

// Parses a system from its JSON file format.
//
// # Safety
// `json` must be a nul-terminated UTF-8 string; `out` must be writable.
enum JsrcertStatus jsrcert_system_from_json(const char *json, struct JsrcertSystem **out);

// # Safety
// `sys` must come from this library and not be used afterwards.
void jsrcert_system_free(struct JsrcertSystem *sys);

// Enumeration bracket on the joint spectral radius over products of
// length up to `q_max`.
//
// # Safety
// Pointers must be valid.
enum JsrcertStatus jsrcert_jsr_bracket(const struct JsrcertSystem *sys,
                                       size_t q_max,
                                       double *lower,
                                       double *upper);

// Draws `count` trajectories of length `horizon` from the system.
//
// # Safety
// Pointers must be valid.
enum JsrcertStatus jsrcert_collect(const struct JsrcertSystem *sys,
                                   size_t count,
                                   size_t horizon,
                                   uint64_t seed,
                                   struct JsrcertSamples **out);

// Wraps externally measured outputs: `y` holds `count` trajectories, each
// `horizon` outputs of `p` values, trajectory-major. `n` and `modes`
// describe the unseen system.
//
// # Safety
// `y` must point to `count*horizon*p` doubles; `out` must be writable.
enum JsrcertStatus jsrcert_samples_from_outputs(size_t n,
                                                size_t modes,
                                                size_t p,
                                                size_t horizon,
                                                size_t count,
                                                const double *y,
                                                uint64_t seed,
                                                struct JsrcertSamples **out);

// # Safety
// `samples` must come from this library and not be used afterwards.
void jsrcert_samples_free(struct JsrcertSamples *samples);

// Solves the scenario program on the samples with window `k`. A
// non-positive `tol_bisect` selects the default tolerance.
//
// # Safety
// Pointers must be valid.
enum JsrcertStatus jsrcert_solve(const struct JsrcertSamples *samples,
                                 size_t k,
                                 double lambda_bar,
                                 double tol_bisect,
                                 struct JsrcertCertificate **out);

// # Safety
// `cert` must come from this library and not be used afterwards.
void jsrcert_certificate_free(struct JsrcertCertificate *cert);

// Optimal rate `γ*`.
//
// # Safety
// Pointers must be valid.
enum JsrcertStatus jsrcert_certificate_gamma(const struct JsrcertCertificate *cert, double *gamma);

// Condition number of `P*`.
//
// # Safety
// Pointers must be valid.
enum JsrcertStatus jsrcert_certificate_kappa(const struct JsrcertCertificate *cert, double *kappa);

// Copies `P*` row-major into `buf`, which holds `len` doubles. `dim`
// receives the side length `kp`; call with `buf = NULL` to query it.
//
// # Safety
// Pointers must be valid; `buf` may be null.
enum JsrcertStatus jsrcert_certificate_p_star(const struct JsrcertCertificate *cert,
                                              double *buf,
                                              size_t len,
                                              size_t *dim);

// Evaluates the bounds and verdict at confidence `1 - beta` and writes the
// JSON report to `json` (release with [`jsrcert_string_free`]). `sys` may
// be null for a data-only report; `c <= 0` omits the a-priori bound.
//
// # Safety
// `cert` must be valid; `sys` may be null; outputs must be writable.
enum JsrcertStatus jsrcert_certify(const struct JsrcertCertificate *cert,
                                   const struct JsrcertSamples *samples,
                                   const struct JsrcertSystem *sys,
                                   double beta,
                                   double c,
                                   enum JsrcertVerdict *verdict,
                                   char **json);

// # Safety
// `s` must come from this library and not be used afterwards.
void jsrcert_string_free(char *s);

// Spherical-cap shrink factor `δ(ε)` in dimension `n`.
//
// # Safety
// `value` must be writable.
enum JsrcertStatus jsrcert_delta(double epsilon, size_t n, double *value);

// Scenario confidence deficit `φ(ε; d, N)`.
//
// # Safety
// `value` must be writable.
enum JsrcertStatus jsrcert_phi(double epsilon, uint64_t d, uint64_t n_samples, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JSRCERT_H */
