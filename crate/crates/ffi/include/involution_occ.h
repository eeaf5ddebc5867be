#ifndef INVOLUTION_OCC_H
#define INVOLUTION_OCC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum {
  IOCC_STATUS_OK = 0,
  /*
   A required pointer argument was NULL.
   */
  IOCC_STATUS_NULL_POINTER = 1,
  /*
   A parameter is outside its documented range or shape.
   */
  IOCC_STATUS_INVALID_ARGUMENT = 2,
  /*
   The supplied map is not a permutation or not self-inverse.
   */
  IOCC_STATUS_NOT_INVOLUTION = 3,
  /*
   Enumeration would exceed the vector limit.
   */
  IOCC_STATUS_TOO_LARGE = 4,
  IOCC_STATUS_NOT_PRIME = 5,
  /*
   Serialization or I/O failure.
   */
  IOCC_STATUS_IO = 6,
  /*
   A string argument is not valid UTF-8.
   */
  IOCC_STATUS_INVALID_UTF8 = 7,
  /*
   Internal panic; the library state is still usable.
   */
  IOCC_STATUS_PANIC = 8,
} IoccStatus;

/*
 Opaque profile of `n! mod p` for `n = 1..p-1`.
 */
typedef struct IoccFactorialProfile IoccFactorialProfile;

/*
 Opaque involution of the ids `0..m`.
 */
typedef struct IoccInvolution IoccInvolution;

/*
 Opaque Monte Carlo summary.
 */
typedef struct IoccSampleSummary IoccSampleSummary;

/*
 Statistics of `m_k / m` for one `k`.
 */
typedef struct {
  size_t k;
  double mean_ratio;
  double sample_variance;
  double std_error;
  double within_window_fraction;
  double main_term;
} IoccSampleRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on the calling thread, or NULL.
 The pointer stays valid until the next failing call on this thread.
 */
const char *iocc_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *iocc_version(void);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void iocc_string_free(char *s);

/*
 Canonical involution of size `m` fixing `0..f` and swapping the remaining
 ids in consecutive pairs.

 # Safety
 `out` must be valid for writes.
 */
IoccStatus iocc_involution_canonical(size_t m, size_t f, IoccInvolution **out);

/*
 Involution from an explicit map of length `m`.

 # Safety
 `map` must point to `m` readable values; `out` must be valid for writes.
 */
IoccStatus iocc_involution_from_map(const size_t *map, size_t m, IoccInvolution **out);

/*
 # Safety
 `h` must be NULL or a live handle from this library.
 */
void iocc_involution_free(IoccInvolution *h);

/*
 Size `m`, or 0 for NULL.

 # Safety
 `h` must be NULL or a live handle.
 */
size_t iocc_involution_m(const IoccInvolution *h);

/*
 Number of fixed points, or 0 for NULL.

 # Safety
 `h` must be NULL or a live handle.
 */
size_t iocc_involution_fixed_count(const IoccInvolution *h);

/*
 # Safety
 `h` must be a live handle; `out` must be valid for writes.
 */
IoccStatus iocc_involution_apply(const IoccInvolution *h, size_t y, size_t *out);

/*
 Limiting density of `m_k / m` when a fraction `theta` of ids is fixed.

 # Safety
 `out` must be valid for writes.
 */
IoccStatus iocc_main_term(size_t k, double theta, double *out);

/*
 Average of `m_k / m` evaluated in the log domain; usable for large `m`.

 # Safety
 `out` must be valid for writes.
 */
IoccStatus iocc_average_log(size_t m, size_t f, size_t k, double *out);

/*
 Exact average rounded to the nearest double.

 # Safety
 `out` must be valid for writes.
 */
IoccStatus iocc_average_exact_f64(size_t m, size_t f, size_t k, double *out);

/*
 Exact average, second moment and variance as JSON rationals
 (`{"a": {"num": "..", "den": ".."}, ...}`).

 # Safety
 `out` must be valid for writes; free the string with `iocc_string_free`.
 */
IoccStatus iocc_exact_stats_json(size_t m, size_t f, size_t k, char **out);

/*
 Chebyshev lower bound on the fraction of vectors with `m_k / m` within `dlt`
 of its limiting density.

 # Safety
 `out` must be valid for writes.
 */
IoccStatus iocc_chebyshev_bound(size_t m, size_t f, size_t k, double dlt, double *out);

/*
 # Safety
 `out` must be valid for writes.
 */
IoccStatus iocc_threshold_c(size_t r, size_t s, double mu, double *out);

/*
 Poisson(1) distribution function at `k`.
 */
double iocc_e_cumulative(size_t k);

/*
 `1/2 + 1/e`.
 */
double iocc_present_pair_threshold(void);

/*
 Brute-force sums over every vector symmetric under `psi`, as JSON.

 # Safety
 `psi` must be a live handle; `out` must be valid for writes.
 */
IoccStatus iocc_oracle_report_json(const IoccInvolution *psi, size_t k_max, char **out);

/*
 Samples `trials` vectors symmetric under `psi`. `jobs == 0` uses the
 global thread pool; the result does not depend on `jobs`.

 # Safety
 `psi` must be a live handle; `out` must be valid for writes.
 */
IoccStatus iocc_sample_estimate(const IoccInvolution *psi,
                                size_t k_max,
                                uint64_t trials,
                                uint64_t seed,
                                double window,
                                size_t jobs,
                                IoccSampleSummary **out);

/*
 # Safety
 `h` must be NULL or a live handle.
 */
void iocc_sample_summary_free(IoccSampleSummary *h);

/*
 Number of rows (`k_max + 1`), or 0 for NULL.

 # Safety
 `h` must be NULL or a live handle.
 */
size_t iocc_sample_summary_len(const IoccSampleSummary *h);

/*
 # Safety
 `h` must be a live handle; `out` must be valid for writes.
 */
IoccStatus iocc_sample_summary_row(const IoccSampleSummary *h, size_t k, IoccSampleRow *out);

/*
 # Safety
 `h` must be a live handle; `out` must be valid for writes.
 */
IoccStatus iocc_sample_summary_json(const IoccSampleSummary *h, char **out);

/*
 # Safety
 `out` must be valid for writes.
 */
IoccStatus iocc_factorial_profile(uint64_t p, IoccFactorialProfile **out);

/*
 # Safety
 `h` must be NULL or a live handle.
 */
void iocc_factorial_profile_free(IoccFactorialProfile *h);

/*
 Number of residue classes hit exactly `k` times, or 0 for NULL.

 # Safety
 `h` must be NULL or a live handle.
 */
uint64_t iocc_factorial_m_k(const IoccFactorialProfile *h, size_t k);

/*
 # Safety
 `h` must be NULL or a live handle.
 */
uint64_t iocc_factorial_distinct_count(const IoccFactorialProfile *h);

/*
 # Safety
 `h` must be NULL or a live handle.
 */
bool iocc_factorial_wilson_holds(const IoccFactorialProfile *h);

/*
 Borrowed pointer to the `p - 1` residues `n! mod p`; `len` receives the count.
 Valid while `h` is alive.

 # Safety
 `h` must be a live handle; `len` must be valid for writes.
 */
const uint64_t *iocc_factorial_residues(const IoccFactorialProfile *h, size_t *len);

/*
 Runs a full command described by a JSON run configuration (the same
 object accepted by the CLI's `--config`, with `"command"` set) and returns
 the rendered report. `output_path` is ignored.

 # Safety
 `config_json` must be a NUL-terminated string; `out` must be valid for writes.
 */
IoccStatus iocc_run_json(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVOLUTION_OCC_H */
