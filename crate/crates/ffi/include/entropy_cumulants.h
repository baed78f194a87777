#ifndef ENTROPY_CUMULANTS_H
#define ENTROPY_CUMULANTS_H

/* Generated by cbindgen from the entropy-cumulants-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Output formats for formula strings.
typedef enum EcFormat {
  EC_FORMAT_LATEX = 0,
  EC_FORMAT_JSON = 1,
  EC_FORMAT_TEXT = 2,
} EcFormat;

// Status codes; mirror the CLI exit codes.
typedef enum EcStatus {
  // Success.
  EC_STATUS_OK = 0,
  // Invalid argument.
  EC_STATUS_USAGE = 1,
  // Verification ran and at least one order failed its threshold.
  EC_STATUS_VERIFY_FAILED = 2,
  // Internal error; see `ec_last_error`.
  EC_STATUS_INTERNAL = 3,
} EcStatus;

// Opaque engine handle.
typedef struct EcEngine EcEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread.
const char *ec_last_error(void);

// Create an engine. `cache_dir` may be null for a purely in-memory store.
// Returns null on failure (see `ec_last_error`).
//
// # Safety
// `cache_dir`, when non-null, must point to a NUL-terminated string.
struct EcEngine *ec_engine_new(const char *cache_dir);

// Release an engine handle. Null is ignored.
//
// # Safety
// `engine` must be null or a pointer returned by `ec_engine_new` that has
// not been freed yet.
void ec_engine_free(struct EcEngine *engine);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string pointer produced by this library.
void ec_string_free(char *s);

// Closed-form cumulant `kappa_order(S)` or `kappa_order(T)` as a string in
// the requested format.
//
// # Safety
// `engine` must be a live handle and `out` a valid output pointer.
enum EcStatus ec_cumulant_formula(struct EcEngine *engine,
                                  char of,
                                  uint32_t order,
                                  enum EcFormat format,
                                  char **out);

// Joint cumulant `kappa_order(X_k, T, ..., T)` for `X` in `{T, R}`.
//
// # Safety
// `engine` must be a live handle and `out` a valid output pointer.
enum EcStatus ec_joint_cumulant_formula(struct EcEngine *engine,
                                        char kind,
                                        uint32_t k,
                                        uint32_t order,
                                        enum EcFormat format,
                                        char **out);

// Mean formula of the ancillary statistic `T_k` or `R_k`.
//
// # Safety
// `engine` must be a live handle and `out` a valid output pointer.
enum EcStatus ec_mean_formula(struct EcEngine *engine,
                              char kind,
                              uint32_t k,
                              enum EcFormat format,
                              char **out);

// Evaluate `kappa_order` at integer dimensions, rendered with `digits`
// significant decimal digits.
//
// # Safety
// `engine` must be a live handle and `out` a valid output pointer.
enum EcStatus ec_eval_cumulant(struct EcEngine *engine,
                               char of,
                               uint32_t order,
                               uint32_t m,
                               uint32_t n,
                               uint32_t digits,
                               char **out);

// Monte Carlo verification of `kappa_l(S)` for the given orders; writes the
// JSON report and returns `VerifyFailed` when any order misses its
// threshold.
//
// # Safety
// `engine` must be a live handle, `orders` must point to `norders` entries,
// and `out_report_json` must be a valid output pointer.
enum EcStatus ec_verify(struct EcEngine *engine,
                        uint32_t m,
                        uint32_t n,
                        const uint32_t *orders,
                        size_t norders,
                        uint64_t samples,
                        uint64_t seed,
                        double threshold,
                        uint32_t workers,
                        char **out_report_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ENTROPY_CUMULANTS_H */
