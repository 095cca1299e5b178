#ifndef BETADYN_H
#define BETADYN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BetadynRegime {
  BETADYN_REGIME_FULL_MEASURE = 0,
  BETADYN_REGIME_COUNTABLE_ZERO,
  BETADYN_REGIME_CASE_AB,
  BETADYN_REGIME_CASE_AC,
  BETADYN_REGIME_WU_SMALL,
  BETADYN_REGIME_WU_LARGE,
  BETADYN_REGIME_BOUNDARY,
} BetadynRegime;

typedef enum BetadynStatus {
  BETADYN_STATUS_OK = 0,
  BETADYN_STATUS_NULL_POINTER,
  BETADYN_STATUS_UTF8,
  BETADYN_STATUS_PARSE,
  BETADYN_STATUS_DOMAIN,
  BETADYN_STATUS_AMBIGUOUS,
  BETADYN_STATUS_UNDECIDED_PARRY,
  BETADYN_STATUS_INVALID_TRUNCATION,
  BETADYN_STATUS_DEGENERATE_ROOT,
  BETADYN_STATUS_NOT_ADMISSIBLE,
  BETADYN_STATUS_BUDGET_EXCEEDED,
  BETADYN_STATUS_AUTOMATON_UNAVAILABLE,
  BETADYN_STATUS_PRECONDITION_VIOLATED,
  BETADYN_STATUS_REGIME_UNSUPPORTED,
  BETADYN_STATUS_SPARSITY_VIOLATED,
  BETADYN_STATUS_CONDITION_VIOLATED,
  BETADYN_STATUS_SLOT_LENGTH_MISMATCH,
  BETADYN_STATUS_INVALID_ROOT,
  BETADYN_STATUS_PANIC,
} BetadynStatus;

/**
 * A base `beta > 1`. Create with `betadyn_beta_new`, release with `betadyn_beta_free`.
 */
typedef struct BetadynBeta BetadynBeta;

typedef struct BetadynDimension {
  double value;
  enum BetadynRegime regime;
  bool proved;
  /**
   * NaN unless the value comes from an optimization over `v`.
   */
  double argmax_v;
} BetadynDimension;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *betadyn_last_error(void);

/**
 * Parse a base: an integer, a rational `p/q`, `phi`, or `root:<poly>:[lo,hi]`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BetadynStatus betadyn_beta_new(const char *spec, struct BetadynBeta **out);

/**
 * # Safety
 * `beta` must come from `betadyn_beta_new` and not have been freed. NULL is ignored.
 */
void betadyn_beta_free(struct BetadynBeta *beta);

/**
 * # Safety
 * `beta` and `out` must be valid pointers.
 */
enum BetadynStatus betadyn_beta_value(const struct BetadynBeta *beta, double *out);

/**
 * First `n` digits of `num/den` in base `beta` into `out[0..n]`.
 *
 * # Safety
 * `out` must have room for `n` values.
 */
enum BetadynStatus betadyn_digits(const struct BetadynBeta *beta,
                                  uint64_t num,
                                  uint64_t den,
                                  size_t n,
                                  uint32_t *out);

/**
 * First `n` digits of the quasi-greedy expansion of 1 into `out[0..n]`.
 *
 * # Safety
 * `out` must have room for `n` values.
 */
enum BetadynStatus betadyn_eps_star(const struct BetadynBeta *beta, size_t n, uint32_t *out);

/**
 * Number of admissible words of length `n`; `BUDGET_EXCEEDED` if it does not fit in 64 bits.
 *
 * # Safety
 * `beta` and `out` must be valid pointers.
 */
enum BetadynStatus betadyn_count_words(const struct BetadynBeta *beta, size_t n, uint64_t *out);

/**
 * # Safety
 * `word` must point to `len` digits (it may be NULL when `len` is 0).
 */
enum BetadynStatus betadyn_is_admissible(const struct BetadynBeta *beta,
                                         const uint32_t *word,
                                         size_t len,
                                         bool *out);

/**
 * Dimension of the set with exact exponents `(vhat, v)`; `v` may be `INFINITY`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum BetadynStatus betadyn_dim_e(const struct BetadynBeta *beta1,
                                 const struct BetadynBeta *beta2,
                                 double vhat,
                                 double v,
                                 struct BetadynDimension *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum BetadynStatus betadyn_dim_w(const struct BetadynBeta *beta1,
                                 const struct BetadynBeta *beta2,
                                 double v,
                                 struct BetadynDimension *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum BetadynStatus betadyn_dim_u(const struct BetadynBeta *beta1,
                                 const struct BetadynBeta *beta2,
                                 double vhat,
                                 struct BetadynDimension *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BETADYN_H */
