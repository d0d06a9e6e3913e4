#ifndef SAWSPEC_H
#define SAWSPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Transform used by [`sawspec_spectrum_new`].
 */
typedef enum SawspecDft {
  SAWSPEC_DFT_NAIVE = 0,
  SAWSPEC_DFT_CHIRP_Z = 1,
} SawspecDft;

/**
 * Kinds accepted by [`sawspec_theoretical_moment`].
 */
typedef enum SawspecMomentKind {
  SAWSPEC_MOMENT_KIND_C = 0,
  SAWSPEC_MOMENT_KIND_S = 1,
  SAWSPEC_MOMENT_KIND_R = 2,
} SawspecMomentKind;

/**
 * Result codes.
 */
typedef enum SawspecStatus {
  SAWSPEC_STATUS_OK = 0,
  SAWSPEC_STATUS_NULL_POINTER = 1,
  SAWSPEC_STATUS_DOMAIN = 2,
  SAWSPEC_STATUS_PRECONDITION = 3,
  SAWSPEC_STATUS_RESOURCE = 4,
  SAWSPEC_STATUS_BUDGET = 5,
  SAWSPEC_STATUS_INVALID_ARGUMENT = 6,
  SAWSPEC_STATUS_IO = 7,
  SAWSPEC_STATUS_BUFFER_TOO_SMALL = 8,
  SAWSPEC_STATUS_PANIC = 9,
} SawspecStatus;

/**
 * Consecutive-prime residue census.
 */
typedef struct SawspecCensus SawspecCensus;

/**
 * Character table modulo a prime together with the `A_{q,chi}` values.
 */
typedef struct SawspecCharacterTable SawspecCharacterTable;

/**
 * Imaginary parts of the Dedekind-sum spectrum.
 */
typedef struct SawspecSpectrum SawspecSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 */
const char *sawspec_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sawspec_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from a `sawspec_*` function returning an owned string,
 * or be null.
 */
void sawspec_string_free(char *s);

/**
 * Exact Dedekind sum `s_q(a) = num / den` in lowest terms.
 *
 * # Safety
 * `num` and `den` must be valid for writes.
 */
enum SawspecStatus sawspec_dedekind_sum(uint64_t q, int64_t a, int64_t *num, int64_t *den);

/**
 * Builds the character table for prime `q` with `A_{q,chi}` summed to
 * `a_cutoff`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SawspecStatus sawspec_character_table_new(uint64_t q,
                                               uint64_t a_cutoff,
                                               struct SawspecCharacterTable **out);

/**
 * # Safety
 * `table` must come from [`sawspec_character_table_new`] or be null.
 */
void sawspec_character_table_free(struct SawspecCharacterTable *table);

/**
 * Modulus of a character table, or 0 for a null handle.
 *
 * # Safety
 * `table` must be a live handle or null.
 */
uint64_t sawspec_character_table_q(const struct SawspecCharacterTable *table);

/**
 * Writes `C(k)` for `k = 1..q-1` into `out[0..q-1]`.
 *
 * # Safety
 * `table` must be live; `out` must hold `len` doubles.
 */
enum SawspecStatus sawspec_ck_all(const struct SawspecCharacterTable *table,
                                  double *out,
                                  size_t len);

/**
 * `C(k)` by the character route.
 *
 * # Safety
 * `table` must be live; `out` valid for writes.
 */
enum SawspecStatus sawspec_ck_point(const struct SawspecCharacterTable *table,
                                    int64_t k,
                                    double *out);

/**
 * `C(k)` for `k = 1..q-1` by the truncated sawtooth route with `N = n`.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum SawspecStatus sawspec_ck_truncated(uint64_t q, uint64_t n, double *out, size_t len);

/**
 * `c2(q; (a, b))`.
 *
 * # Safety
 * `table` must be live; `out` valid for writes.
 */
enum SawspecStatus sawspec_c2_pair(const struct SawspecCharacterTable *table,
                                   int64_t a,
                                   int64_t b,
                                   double *out);

/**
 * `c1` and `c2` of a residue pattern of length `len >= 2`.
 *
 * # Safety
 * `table` must be live; `residues` must hold `len` values; outputs valid
 * for writes.
 */
enum SawspecStatus sawspec_pattern_constants(const struct SawspecCharacterTable *table,
                                             const int64_t *residues,
                                             size_t len,
                                             double *c1,
                                             double *c2);

/**
 * Spectrum `Im s-hat_q(t)` for `t = 0..q-1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SawspecStatus sawspec_spectrum_new(uint64_t q,
                                        enum SawspecDft dft,
                                        struct SawspecSpectrum **out);

/**
 * # Safety
 * `spectrum` must come from [`sawspec_spectrum_new`] or be null.
 */
void sawspec_spectrum_free(struct SawspecSpectrum *spectrum);

/**
 * Number of values (`q`), or 0 for a null handle.
 *
 * # Safety
 * `spectrum` must be live or null.
 */
size_t sawspec_spectrum_len(const struct SawspecSpectrum *spectrum);

/**
 * Copies the spectrum into `out[0..q]`.
 *
 * # Safety
 * `spectrum` must be live; `out` must hold `len` doubles.
 */
enum SawspecStatus sawspec_spectrum_values(const struct SawspecSpectrum *spectrum,
                                           double *out,
                                           size_t len);

/**
 * Exact `B(moduli)` as a newly allocated `"num/den"` string (free with
 * [`sawspec_string_free`]) and as a double.
 *
 * # Safety
 * `moduli` must hold `len` values; `text` and `value` valid for writes
 * (`text` may be null).
 */
enum SawspecStatus sawspec_b_exact(const uint64_t *moduli, size_t len, char **text, double *value);

/**
 * Lattice-sum estimate of `B(moduli)` with box size `k`.
 *
 * # Safety
 * `moduli` must hold `len` values; `out` valid for writes.
 */
enum SawspecStatus sawspec_b_lattice(const uint64_t *moduli, size_t len, uint64_t k, double *out);

/**
 * `(1/q) sum_k prod_j psi(k n_j-bar / q)`.
 *
 * # Safety
 * `moduli` must hold `len` values; `out` valid for writes.
 */
enum SawspecStatus sawspec_discrete_correlation(uint64_t q,
                                                const uint64_t *moduli,
                                                size_t len,
                                                double *out);

/**
 * Truncated theoretical moment of order `ell`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SawspecStatus sawspec_theoretical_moment(enum SawspecMomentKind kind,
                                              uint32_t ell,
                                              uint64_t b,
                                              double *out);

/**
 * `C(x; B)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SawspecStatus sawspec_continuous_model(double x, uint64_t b, double *out);

/**
 * `(1/y) int_0^y R~(u)^ell du`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SawspecStatus sawspec_rtilde_moment(uint64_t y, uint32_t ell, double *out);

/**
 * Principal-value logarithmic integral.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SawspecStatus sawspec_log_integral(double x, double *out);

/**
 * Census of length-`r` residue patterns of consecutive primes `p_n <= x`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SawspecStatus sawspec_census_new(uint64_t x, uint64_t q, size_t r, struct SawspecCensus **out);

/**
 * # Safety
 * `census` must come from [`sawspec_census_new`] or be null.
 */
void sawspec_census_free(struct SawspecCensus *census);

/**
 * Count of one residue tuple of length `r`.
 *
 * # Safety
 * `census` must be live; `residues` must hold `len` values; `out` valid
 * for writes.
 */
enum SawspecStatus sawspec_census_count(const struct SawspecCensus *census,
                                        const uint64_t *residues,
                                        size_t len,
                                        uint64_t *out);

/**
 * Sum of all counts in the census.
 *
 * # Safety
 * `census` must be live; `out` valid for writes.
 */
enum SawspecStatus sawspec_census_total(const struct SawspecCensus *census, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SAWSPEC_H */
