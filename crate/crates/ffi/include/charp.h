#ifndef CHARP_H
#define CHARP_H

/* Generated by cbindgen from the charp-ffi sources; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum CharpStatus {
  CHARP_STATUS_OK = 0,
  CHARP_STATUS_NULL_POINTER = 1,
  CHARP_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed series or modulus, unknown symbol, coefficient outside the
   * field, repeated exponent.
   */
  CHARP_STATUS_PARSE = 3,
  /**
   * Invalid field parameters.
   */
  CHARP_STATUS_FIELD = 4,
  /**
   * Input violates a mathematical precondition (zero or constant series,
   * truncation too small, ...).
   */
  CHARP_STATUS_PRECONDITION = 5,
  CHARP_STATUS_INFINITE_MILNOR = 6,
  CHARP_STATUS_BUDGET = 7,
  CHARP_STATUS_INTERNAL = 8,
  CHARP_STATUS_PANIC = 9,
} CharpStatus;

typedef struct CharpField CharpField;

typedef struct CharpSeries CharpSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *charp_last_error(void);

/**
 * `F_{p^deg}` with the default modulus.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CharpStatus charp_field_new(uint32_t p, uint32_t deg, struct CharpField **out);

/**
 * Field defined by a modulus written in `g`, e.g. `"g^2+g+1"`.
 *
 * # Safety
 * `modulus` must be a NUL-terminated string and `out` valid for writes.
 */
enum CharpStatus charp_field_with_modulus(uint32_t p, const char *modulus, struct CharpField **out);

/**
 * # Safety
 * `field` must come from this library and not be freed twice; NULL is ignored.
 */
void charp_field_free(struct CharpField *field);

/**
 * JSON `{"p":..,"deg":..,"modulus":".."}`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum CharpStatus charp_field_describe(const struct CharpField *field, char **out);

/**
 * Parses a series such as `"x^2 + (g+1)*x^5"`. A negative `trunc` selects
 * the default precision `max(largest exponent, dbar + 1)`.
 *
 * # Safety
 * `field` must be a live handle, `text_in` NUL-terminated and `out` valid
 * for writes.
 */
enum CharpStatus charp_series_parse(const struct CharpField *field,
                                    const char *text_in,
                                    int64_t trunc,
                                    struct CharpSeries **out);

/**
 * # Safety
 * `series` must come from this library and not be freed twice; NULL is
 * ignored.
 */
void charp_series_free(struct CharpSeries *series);

/**
 * Text form, parseable by `charp_series_parse`.
 *
 * # Safety
 * `series` must be a live handle and `out` valid for writes.
 */
enum CharpStatus charp_series_to_string(const struct CharpSeries *series, char **out);

/**
 * Precision of the series.
 *
 * # Safety
 * `series` must be a live handle and `out` valid for writes.
 */
enum CharpStatus charp_series_trunc(const struct CharpSeries *series, size_t *out);

/**
 * Support invariants and Lambda sets as JSON.
 *
 * # Safety
 * `series` must be a live handle and `out` valid for writes.
 */
enum CharpStatus charp_invariants_json(const struct CharpSeries *series, char **out);

/**
 * Normal form, parameters and coordinate change as JSON.
 *
 * # Safety
 * `series` must be a live handle and `out` valid for writes.
 */
enum CharpStatus charp_normal_form_json(const struct CharpSeries *series, char **out);

/**
 * Coordinate change matching `f` to `g`, as JSON; `"matched": false` with
 * a reason when their `d(f)`-jets differ.
 *
 * # Safety
 * `f`, `g` must be live handles and `out` valid for writes.
 */
enum CharpStatus charp_match_jets_json(const struct CharpSeries *f,
                                       const struct CharpSeries *g,
                                       char **out);

/**
 * Milnor number. `*infinite` is set to 1 when `f' = 0`, and `*mu` is then 0.
 *
 * # Safety
 * `series` must be a live handle; `mu` and `infinite` valid for writes.
 */
enum CharpStatus charp_milnor(const struct CharpSeries *series, uint64_t *mu, bool *infinite);

/**
 * Right modality `floor(mu / p)`; `CHARP_STATUS_INFINITE_MILNOR` when
 * `mu` is infinite.
 *
 * # Safety
 * `series` must be a live handle and `out` valid for writes.
 */
enum CharpStatus charp_modality(const struct CharpSeries *series, uint64_t *out);

/**
 * Determinacy bound `d(f)`. `*e` receives `e(f)`; a nonzero value marks
 * infinite Milnor number, where the bound holds among series of equal `e`.
 *
 * # Safety
 * `series` must be a live handle; `d` and `e` valid for writes.
 */
enum CharpStatus charp_determinacy(const struct CharpSeries *series, uint64_t *d, uint32_t *e);

/**
 * Releases a string returned by the library; NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void charp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARP_H */
