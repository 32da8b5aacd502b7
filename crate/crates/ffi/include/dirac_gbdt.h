#ifndef DIRAC_GBDT_H
#define DIRAC_GBDT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call; success is zero.
typedef enum DgStatus {
  DG_STATUS_OK = 0,
  // A required pointer was null.
  DG_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not UTF-8.
  DG_STATUS_INVALID_UTF8 = 2,
  // The scenario, example name or a parameter was rejected.
  DG_STATUS_INVALID_INPUT = 3,
  // A mathematical hypothesis does not hold (domain of `z`, `c != 0` for `ω`, ...).
  DG_STATUS_HYPOTHESIS = 4,
  // `S(0)` is not positive definite where positivity is required.
  DG_STATUS_NOT_POSITIVE = 5,
  // A linear-algebra step failed: singular matrix, pole, overflow, no convergence.
  DG_STATUS_NUMERICAL = 6,
  // The output buffer is shorter than the result.
  DG_STATUS_BUFFER_TOO_SMALL = 7,
  // A panic was caught at the boundary.
  DG_STATUS_PANIC = 8,
} DgStatus;

// Opaque handle to a validated triple. Free with [`dg_triple_free`].
typedef struct DgTriple DgTriple;

// Layout-compatible with C99 `double _Complex`.
typedef struct DgComplex {
  double re;
  double im;
} DgComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a triple from scenario TOML text (the format read by the CLI).
enum DgStatus dg_triple_from_scenario(const char *toml, struct DgTriple **out);

// Builds one of the canned examples. `keys`/`values` hold `count` parameter
// overrides; both may be null when `count` is zero.
enum DgStatus dg_triple_from_example(const char *name,
                                     const char *const *keys,
                                     const double *values,
                                     size_t count,
                                     struct DgTriple **out);

// Releases a handle. Null is a no-op.
void dg_triple_free(struct DgTriple *triple);

// `n` (size of `A`), `p` (block size of the seed) and `kappa` (1 for the
// self-adjoint system, 0 for the skew-self-adjoint one). Null outputs are skipped.
enum DgStatus dg_triple_dims(const struct DgTriple *triple, size_t *n, size_t *p, uint8_t *kappa);

// Transformed potential `ṽ(x)`.
enum DgStatus dg_eval_potential(const struct DgTriple *triple,
                                double x,
                                struct DgComplex *out,
                                size_t len);

// Real scalar `ω(x)`; requires a scalar skew-self-adjoint triple with `c = 0`
// and purely imaginary `a`.
enum DgStatus dg_eval_omega(const struct DgTriple *triple, double x, double *out);

// `S(x)` by the default method for the triple.
enum DgStatus dg_eval_s(const struct DgTriple *triple, double x, struct DgComplex *out, size_t len);

// Transfer matrix `w_A(x, z)`.
enum DgStatus dg_eval_transfer(const struct DgTriple *triple,
                               double x,
                               struct DgComplex z,
                               struct DgComplex *out,
                               size_t len);

// `ψ(x, ξ) = Π(x)^* S(x)^{-1} e^{-ξA}`.
enum DgStatus dg_eval_dynamical(const struct DgTriple *triple,
                                double x,
                                double xi,
                                struct DgComplex *out,
                                size_t len);

// Weyl function `φ(z)` for `Im z > 0`; needs `S(0) > 0`.
enum DgStatus dg_weyl(const struct DgTriple *triple,
                      struct DgComplex z,
                      struct DgComplex *out,
                      size_t len);

// Copies the calling thread's last error message, NUL-terminated and
// truncated to `len`, into `buf`. Returns the full message length without
// the terminator, so a zero-length probe sizes the buffer. Empty after success.
size_t dg_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *dg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRAC_GBDT_H */
