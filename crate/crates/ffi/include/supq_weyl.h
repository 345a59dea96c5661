#ifndef SUPQ_WEYL_H
#define SUPQ_WEYL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwStatus {
  SW_STATUS_OK = 0,
  SW_STATUS_NULL_POINTER = 1,
  SW_STATUS_INVALID_ARGUMENT = 2,
  SW_STATUS_DIMENSION_MISMATCH = 3,
  SW_STATUS_SINGULAR = 4,
  SW_STATUS_NOT_POSITIVE_DEFINITE = 5,
  SW_STATUS_PRECONDITION = 6,
  SW_STATUS_BUDGET = 7,
  SW_STATUS_JSON = 8,
  SW_STATUS_NOT_IN_GROUP = 9,
  SW_STATUS_INTERNAL = 10,
} SwStatus;

/**
 * Opaque element `(h, k)` of `H_n x SU(p,q)`.
 */
typedef struct SwGroupElement SwGroupElement;

/**
 * Opaque polynomial symbol of degree at most two.
 */
typedef struct SwPoly SwPoly;

/**
 * Opaque `SU(p,q)` element.
 */
typedef struct SwSupq SwSupq;

/**
 * Opaque Gaussian symbol `c exp(v^t M v + l . v + k)`, `v = (z, conj z)`.
 */
typedef struct SwSymbol SwSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call on the same thread.
 */
const char *sw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sw_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` is null or came from a `*_to_json` call and has not been freed.
 */
void sw_string_free(char *s);

/**
 * Parses `{"p", "q", "A", "B", "C", "D"}` and checks membership in `SU(p,q)`.
 *
 * # Safety
 * `json` is a NUL-terminated string, `out` is writable.
 */
enum SwStatus sw_supq_from_json(const char *json, struct SwSupq **out);

/**
 * Seeded `exp(X)` with `X` a random algebra element of size `scale`.
 *
 * # Safety
 * `out` is writable.
 */
enum SwStatus sw_supq_random(size_t p, size_t q, uint64_t seed, double scale, struct SwSupq **out);

/**
 * # Safety
 * `k` is a live handle, `out` is writable. Free the result with `sw_string_free`.
 */
enum SwStatus sw_supq_to_json(const struct SwSupq *k, char **out);

/**
 * # Safety
 * `k` is null or a handle not yet freed.
 */
void sw_supq_free(struct SwSupq *k);

/**
 * Parses `{"h": {"z", "c"}, "k": {...}}`.
 *
 * # Safety
 * `json` is a NUL-terminated string, `out` is writable.
 */
enum SwStatus sw_group_element_from_json(const char *json, struct SwGroupElement **out);

/**
 * # Safety
 * `g` is null or a handle not yet freed.
 */
void sw_group_element_free(struct SwGroupElement *g);

/**
 * Closed-form `W(sigma(k))`. Fails with `Precondition` when
 * `|det(k + I)| <= det_epsilon`; pass a negative `det_epsilon` for the default.
 *
 * # Safety
 * `k` is a live handle, `out` is writable.
 */
enum SwStatus sw_weyl_sigma(const struct SwSupq *k,
                            double lambda,
                            double det_epsilon,
                            struct SwSymbol **out);

/**
 * Closed-form `W(pi(g))`.
 *
 * # Safety
 * `g` is a live handle, `out` is writable.
 */
enum SwStatus sw_weyl_pi(const struct SwGroupElement *g,
                         double lambda,
                         double det_epsilon,
                         struct SwSymbol **out);

/**
 * Closed-form Berezin symbol `S(sigma(k))`.
 *
 * # Safety
 * `k` is a live handle, `out` is writable.
 */
enum SwStatus sw_berezin_sigma(const struct SwSupq *k, double lambda, struct SwSymbol **out);

/**
 * Closed-form Berezin symbol `S(pi(g))`.
 *
 * # Safety
 * `g` is a live handle, `out` is writable.
 */
enum SwStatus sw_berezin_pi(const struct SwGroupElement *g, double lambda, struct SwSymbol **out);

/**
 * Number of complex coordinates `n = p + q` of the symbol's domain.
 *
 * # Safety
 * `s` is a live handle.
 */
size_t sw_symbol_dim(const struct SwSymbol *s);

/**
 * Evaluates at `z`: `n` complex coordinates as `2n` interleaved doubles.
 * Writes `(re, im)` to `out[0..2]`.
 *
 * # Safety
 * `z` holds `2 * n` doubles, `out` holds two.
 */
enum SwStatus sw_symbol_eval(const struct SwSymbol *s, const double *z, size_t n, double *out);

/**
 * # Safety
 * `s` is null or a handle not yet freed.
 */
void sw_symbol_free(struct SwSymbol *s);

/**
 * `W(d sigma(X))` for `X` given as `{"p", "q", "A", "B", "C", "D"}`.
 *
 * # Safety
 * `json` is a NUL-terminated string, `out` is writable.
 */
enum SwStatus sw_dweyl_sigma_from_json(const char *json, double lambda, struct SwPoly **out);

/**
 * `W(d pi(X))` for `X` given as `{"z0", "c0", "Y"}`.
 *
 * # Safety
 * `json` is a NUL-terminated string, `out` is writable.
 */
enum SwStatus sw_dweyl_pi_from_json(const char *json, double lambda, struct SwPoly **out);

/**
 * # Safety
 * As for `sw_symbol_eval`.
 */
enum SwStatus sw_poly_eval(const struct SwPoly *s, const double *z, size_t n, double *out);

/**
 * # Safety
 * `s` is null or a handle not yet freed.
 */
void sw_poly_free(struct SwPoly *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPQ_WEYL_H */
