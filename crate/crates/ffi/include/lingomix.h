#ifndef LINGOMIX_H
#define LINGOMIX_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LmStatus {
  LM_STATUS_OK = 0,
  LM_STATUS_NULL_ARGUMENT = 1,
  LM_STATUS_INVALID_UTF8 = 2,
  LM_STATUS_UNKNOWN_LANGUAGE = 3,
  LM_STATUS_INVALID_INPUT = 4,
  LM_STATUS_OUT_OF_RANGE = 5,
  LM_STATUS_IO = 6,
  LM_STATUS_SERVICE_UNAVAILABLE = 7,
  LM_STATUS_PANIC = 8,
} LmStatus;

/**
 * Opaque CIDEr-D accumulator: add items, then compute once.
 */
typedef struct LmCider LmCider;

/**
 * Opaque training mix plan.
 */
typedef struct LmPlan LmPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lm_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *lm_version(void);

/**
 * Release a string returned by this library. Null is ignored.
 */
void lm_string_free(char *s);

/**
 * Allocate a budget. `english_fraction` accepts "0.5", "50%" or "1/2";
 * `setup` is one of english, t5, t5-t4, t5-t3, t5-t2, l100; a null
 * `distribution` means uniform.
 */
enum LmStatus lm_plan_allocate(uint64_t budget,
                               const char *english_fraction,
                               const char *setup,
                               const char *distribution,
                               struct LmPlan **out);

/**
 * Parse a plan previously written with [`lm_plan_to_json`].
 */
enum LmStatus lm_plan_from_json(const char *json, struct LmPlan **out);

void lm_plan_free(struct LmPlan *plan);

/**
 * Serialize the plan; free the result with [`lm_string_free`].
 */
enum LmStatus lm_plan_to_json(const struct LmPlan *plan, char **out);

/**
 * English share of the plan. Returns 0 for a null plan.
 */
uint64_t lm_plan_english(const struct LmPlan *plan);

/**
 * Sum of all counts, English included. Returns 0 for a null plan.
 */
uint64_t lm_plan_total(const struct LmPlan *plan);

/**
 * Number of entries (English first, then canonical language order).
 */
size_t lm_plan_len(const struct LmPlan *plan);

/**
 * Entry `index`: its language code (free with [`lm_string_free`]) and count.
 */
enum LmStatus lm_plan_entry(const struct LmPlan *plan,
                            size_t index,
                            char **code_out,
                            uint64_t *count_out);

/**
 * Count for one language (aliases accepted); 0 when it is not in the plan.
 */
enum LmStatus lm_plan_count(const struct LmPlan *plan, const char *code, uint64_t *out);

/**
 * Resource tier (0 to 5) of a language code or alias.
 */
enum LmStatus lm_language_tier(const char *code, uint8_t *out);

/**
 * Canonical code for a code or alias; free with [`lm_string_free`].
 */
enum LmStatus lm_language_canonical(const char *code, char **out);

/**
 * 1 if the prediction matches, 0 if not; `out` receives the result.
 */
enum LmStatus lm_exact_match(const char *prediction, const char *gold, uint8_t *out);

/**
 * Like [`lm_exact_match`], but a leading choice letter also counts.
 */
enum LmStatus lm_relaxed_match(const char *prediction, const char *gold, uint8_t *out);

struct LmCider *lm_cider_new(void);

void lm_cider_free(struct LmCider *c);

/**
 * Add one candidate with `n_refs` reference captions.
 */
enum LmStatus lm_cider_add(struct LmCider *c,
                           const char *candidate,
                           const char *const *refs,
                           size_t n_refs);

/**
 * Corpus CIDEr-D (0 to 10) over all added items.
 */
enum LmStatus lm_cider_compute(struct LmCider *c, double *out);

/**
 * Score of item `index` from the last [`lm_cider_compute`].
 */
enum LmStatus lm_cider_item(const struct LmCider *c, size_t index, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINGOMIX_H */
