#ifndef FMZV_H
#define FMZV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every call.
typedef enum FmzvStatus {
  FMZV_STATUS_OK = 0,
  // A required pointer was null.
  FMZV_STATUS_NULL_POINTER = 1,
  // An argument is out of the operation's domain.
  FMZV_STATUS_INVALID_ARGUMENT = 2,
  // A value has no inverse modulo the prime.
  FMZV_STATUS_ZERO_INVERSE = 3,
  // A base shares a factor with the prime.
  FMZV_STATUS_SHARED_FACTOR = 4,
  // The prime divides the level.
  FMZV_STATUS_LEVEL_SHARES_FACTOR = 5,
  // `p − 1` divides the Bernoulli index.
  FMZV_STATUS_POLE = 6,
  // Malformed JSON or index text.
  FMZV_STATUS_PARSE = 7,
  // Two independent computations disagreed.
  FMZV_STATUS_INCONSISTENT = 8,
  // A search ran past its bound.
  FMZV_STATUS_EXHAUSTED = 9,
  // A bug or resource failure inside the library.
  FMZV_STATUS_INTERNAL = 10,
} FmzvStatus;

// Per-prime workspace with cached inverse tables.
typedef struct FmzvPrimeContext FmzvPrimeContext;

// A verification report.
typedef struct FmzvReport FmzvReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a
// successful call. Valid until the next call on the same thread.
const char *fmzv_last_error(void);

// Library version as a static string.
const char *fmzv_version(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void fmzv_string_free(char *s);

// Creates a context for the odd prime `p < 2^32`.
//
// # Safety
// `out` must be valid for writing a pointer.
enum FmzvStatus fmzv_context_new(uint64_t p, struct FmzvPrimeContext **out);

// # Safety
// `ctx` must come from [`fmzv_context_new`] and not have been freed.
void fmzv_context_free(struct FmzvPrimeContext *ctx);

// `ζ_p(k) mod p` for the index `parts[0..len]`.
//
// # Safety
// Pointers must be valid for the given lengths.
enum FmzvStatus fmzv_zeta(const struct FmzvPrimeContext *ctx,
                          const uint32_t *parts,
                          size_t len,
                          uint64_t *out);

// The colored sum with `m_i ≡ alpha[i] (mod level)`; `alpha` has `len`
// entries.
//
// # Safety
// Pointers must be valid for the given lengths.
enum FmzvStatus fmzv_zeta_colored(const struct FmzvPrimeContext *ctx,
                                  const uint32_t *parts,
                                  size_t len,
                                  uint64_t level,
                                  const uint64_t *alpha,
                                  uint64_t *out);

// The nested sum over `jp/N < m_1 < ⋯ < m_r < (j+1)p/N`.
//
// # Safety
// Pointers must be valid for the given lengths.
enum FmzvStatus fmzv_interval_sum(const struct FmzvPrimeContext *ctx,
                                  const uint32_t *parts,
                                  size_t len,
                                  uint64_t level,
                                  uint64_t j,
                                  uint64_t *out);

// `B_n mod p` with `B_1 = +1/2`.
//
// # Safety
// `out` must be valid for writing.
enum FmzvStatus fmzv_bernoulli_mod_p(uint64_t n, uint64_t p, uint64_t *out);

// `𝔷(k) = B_{p−k}/k mod p` for `2 <= k <= p − 2`.
//
// # Safety
// `out` must be valid for writing.
enum FmzvStatus fmzv_frak_z(uint64_t k, uint64_t p, uint64_t *out);

// Fermat quotient `q_p(n)`.
//
// # Safety
// `out` must be valid for writing.
enum FmzvStatus fmzv_fermat_quotient(uint64_t n, uint64_t p, uint64_t *out);

// Least `N >= 2` with `q_p(N) ≢ 0`.
//
// # Safety
// `out` must be valid for writing.
enum FmzvStatus fmzv_ell_p(uint64_t p, uint64_t *out);

// Least odd `k >= 3` with `𝔷(k) ≢ 0`.
//
// # Safety
// `out` must be valid for writing.
enum FmzvStatus fmzv_eth_p(uint64_t p, uint64_t *out);

// Inverts `values[0..len]` modulo `modulus` into `out[0..len]`. Fails
// with `ZeroInverse` naming the first non-invertible position.
//
// # Safety
// `values` and `out` must be valid for `len` elements.
enum FmzvStatus fmzv_batch_inv(const uint64_t *values, size_t len, uint64_t modulus, uint64_t *out);

// Verifies the identity `id` from a catalogue document (or from the
// built-in catalogue when `catalogue_json` is null) at every prime of
// `[pmin, pmax]`.
//
// # Safety
// String arguments must be nul-terminated; `out` must be valid.
enum FmzvStatus fmzv_verify_identity(const char *catalogue_json,
                                     const char *id,
                                     uint64_t pmin,
                                     uint64_t pmax,
                                     bool strict_skips,
                                     struct FmzvReport **out);

// # Safety
// `report` must be a live handle.
enum FmzvStatus fmzv_report_is_clean(const struct FmzvReport *report, bool *out);

// Counts of passed, failed and skipped primes.
//
// # Safety
// `report` must be a live handle; out pointers must be valid.
enum FmzvStatus fmzv_report_counts(const struct FmzvReport *report,
                                   uint64_t *passed,
                                   uint64_t *failed,
                                   uint64_t *skipped);

// The report as JSON; free with [`fmzv_string_free`].
//
// # Safety
// `report` must be a live handle; `out` must be valid.
enum FmzvStatus fmzv_report_json(const struct FmzvReport *report, char **out);

// # Safety
// `report` must come from this library and not have been freed.
void fmzv_report_free(struct FmzvReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FMZV_H */
