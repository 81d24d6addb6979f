#ifndef FERMI_ENT_H
#define FERMI_ENT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FeStatus {
  FE_STATUS_OK = 0,
  FE_STATUS_INVALID_ARGUMENT = 1,
  FE_STATUS_PARSE = 2,
  FE_STATUS_VALIDATION = 3,
  FE_STATUS_NUMERICAL = 4,
  FE_STATUS_RESOURCE_EXHAUSTED = 5,
  FE_STATUS_IO = 6,
  FE_STATUS_NULL_POINTER = 7,
  FE_STATUS_BUFFER_TOO_SMALL = 8,
  FE_STATUS_PANIC = 9,
} FeStatus;

// Verdict of `fe_search`.
typedef enum FeVerdict {
  FE_VERDICT_NOT_EXISTS = 0,
  FE_VERDICT_EXISTS_WITH_STATE = 1,
  FE_VERDICT_EXISTS_STEINER_ONLY = 2,
  FE_VERDICT_EXHAUSTED_NO_SOLUTION = 3,
  FE_VERDICT_UNKNOWN = 4,
} FeVerdict;

// Opaque N-fermion state.
typedef struct FeState FeState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the next call.
const char *fe_last_error(void);

// Library version as a static NUL-terminated string.
const char *fe_version(void);

// # Safety
// `s` must come from this library and not be freed twice.
void fe_string_free(char *s);

// # Safety
// `state` must come from this library and not be freed twice.
void fe_state_free(struct FeState *state);

// # Safety
// `out` must be valid for writes.
enum FeStatus fe_state_ghz(uintptr_t d, uintptr_t r, struct FeState **out);

// # Safety
// `out` must be valid for writes.
enum FeStatus fe_state_paired(uintptr_t d, uintptr_t k, struct FeState **out);

// Gaussian random state on all `C(D,N)` determinants.
//
// # Safety
// `out` must be valid for writes.
enum FeStatus fe_state_random(uintptr_t d, uintptr_t n, uint64_t seed, struct FeState **out);

// Parses a JSON state file.
//
// # Safety
// `json` must be a NUL-terminated string and `out` valid for writes.
enum FeStatus fe_state_from_json(const char *json, bool renormalize, struct FeState **out);

// # Safety
// `state` must be a live handle and `out` valid for writes.
enum FeStatus fe_state_to_json(const struct FeState *state, char **out);

// # Safety
// `state` must be a live handle; the outputs must be valid for writes.
enum FeStatus fe_state_shape(const struct FeState *state,
                             uintptr_t *num_orbitals,
                             uintptr_t *num_particles,
                             uintptr_t *num_terms);

// von Neumann entropy of `rho^(M)` in nats.
//
// # Safety
// `state` must be a live handle and `out` valid for writes.
enum FeStatus fe_entropy(const struct FeState *state, uintptr_t m, double *out);

// Descending eigenvalues of `rho^(M)`. `len` is the capacity of `buf`;
// `written` receives the spectrum length, also when the buffer is too small.
//
// # Safety
// `buf` must hold `len` doubles (or be NULL when `len` is 0); `written` must be valid for writes.
enum FeStatus fe_spectrum(const struct FeState *state,
                          uintptr_t m,
                          double *buf,
                          uintptr_t len,
                          uintptr_t *written);

// Whether `rho^(M)` equals `(C(N,M)/C(D,M)) I` within `tol` entrywise.
//
// # Safety
// `state` must be a live handle; the outputs must be valid for writes.
enum FeStatus fe_verify_maximal(const struct FeState *state,
                                uintptr_t m,
                                double tol,
                                bool *maximal,
                                double *deviation);

// Existence search. `max_classes == 0` and `max_seconds <= 0` mean the
// library defaults. `report_json` (optional) receives the full report and
// `state_out` (optional) the found state, or NULL.
//
// # Safety
// Non-NULL pointers must be valid for writes.
enum FeStatus fe_search(uintptr_t d,
                        uintptr_t n,
                        uintptr_t m,
                        uint64_t max_classes,
                        double max_seconds,
                        enum FeVerdict *verdict,
                        struct FeState **state_out,
                        char **report_json);

// The constant `a_2` of the c = 1 entropy expansion.
//
// # Safety
// `out` must be valid for writes.
enum FeStatus fe_compute_a2(double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FERMI_ENT_H */
