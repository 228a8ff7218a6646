/* C ABI for the oodeval out-of-distribution detector evaluation library. */

#ifndef OODEVAL_H
#define OODEVAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Integration mode for the AUTC areas.
typedef enum OodevalIntegration {
  OODEVAL_INTEGRATION_TRAPEZOID = 0,
  OODEVAL_INTEGRATION_EXACT_STEP = 1,
} OodevalIntegration;

// Operating-point query for `oodeval_rate_at_level`.
typedef enum OodevalRateQuery {
  OODEVAL_RATE_QUERY_FPR_AT_TPR = 0,
  OODEVAL_RATE_QUERY_TNR_AT_TPR = 1,
  OODEVAL_RATE_QUERY_FNR_AT_TNR = 2,
} OodevalRateQuery;

// Status codes returned by every fallible entry point.
typedef enum OodevalStatus {
  OODEVAL_STATUS_OK = 0,
  OODEVAL_STATUS_NULL_POINTER = 1,
  OODEVAL_STATUS_EMPTY_INPUT = 2,
  OODEVAL_STATUS_NON_FINITE_SCORE = 3,
  OODEVAL_STATUS_DEGENERATE_BOUNDS = 4,
  OODEVAL_STATUS_SCORES_OUT_OF_RANGE = 5,
  OODEVAL_STATUS_CONSTRAINT_UNREACHABLE = 6,
  OODEVAL_STATUS_MISSING_DATASET = 7,
  OODEVAL_STATUS_UNKNOWN_PRESET = 8,
  OODEVAL_STATUS_PARSE_ERROR = 9,
  OODEVAL_STATUS_IO_ERROR = 10,
  OODEVAL_STATUS_INVALID_ARGUMENT = 11,
  OODEVAL_STATUS_PANIC = 12,
} OodevalStatus;

// Opaque score-set handle.
typedef struct OodevalScoreSet OodevalScoreSet;

// AUFPR, AUFNR and their weighted combination.
typedef struct OodevalAutcResult {
  double aufpr;
  double aufnr;
  double autc;
} OodevalAutcResult;

// Crossing point of the FPR and FNR curves.
typedef struct OodevalCrossing {
  double threshold;
  double fpr;
  double fnr;
} OodevalCrossing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent error on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *oodeval_last_error_message(void);

// Library version as a static string.
const char *oodeval_version(void);

// Creates a score set from `len` doubles. `name` may be null.
//
// # Safety
//
// `scores` must point to `len` readable doubles, `name` must be null or
// a NUL-terminated string, and `out` must be a valid pointer.
enum OodevalStatus oodeval_scoreset_new(const double *scores,
                                        size_t len,
                                        const char *name,
                                        bool is_ood,
                                        struct OodevalScoreSet **out);

// Frees a score set. Null is a no-op.
//
// # Safety
//
// `set` must be null or a pointer obtained from this library that has
// not been freed yet.
void oodeval_scoreset_free(struct OodevalScoreSet *set);

// Number of scores in a set.
//
// # Safety
//
// `set` must be a live score-set pointer.
size_t oodeval_scoreset_len(const struct OodevalScoreSet *set);

// Affine-maps scores into `[0, 1]` with clipping; writes a new handle.
//
// # Safety
//
// `set` must be a live score-set pointer and `out` a valid pointer.
enum OodevalStatus oodeval_scoreset_normalized(const struct OodevalScoreSet *set,
                                               double lo,
                                               double hi,
                                               struct OodevalScoreSet **out);

// Rank statistic: probability that an OOD score outranks an ID score.
//
// # Safety
//
// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
enum OodevalStatus oodeval_auroc(const struct OodevalScoreSet *id,
                                 const struct OodevalScoreSet *ood,
                                 double *out);

// Area under the precision-recall curve (trapezoidal).
//
// # Safety
//
// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
enum OodevalStatus oodeval_aupr(const struct OodevalScoreSet *id,
                                const struct OodevalScoreSet *ood,
                                bool ood_positive,
                                double *out);

// AUFPR, AUFNR and weighted AUTC. Scores must lie in `[0, 1]`.
//
// # Safety
//
// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
enum OodevalStatus oodeval_autc(const struct OodevalScoreSet *id,
                                const struct OodevalScoreSet *ood,
                                double weight_fpr,
                                enum OodevalIntegration integration,
                                struct OodevalAutcResult *out);

// Best equal-prior detection error and its threshold.
//
// # Safety
//
// `id` and `ood` must be live score-set pointers; `error_out` and
// `threshold_out` must be valid pointers.
enum OodevalStatus oodeval_detection_error(const struct OodevalScoreSet *id,
                                           const struct OodevalScoreSet *ood,
                                           double *error_out,
                                           double *threshold_out);

// Best rate subject to `query >= level`, plus the realizing threshold.
//
// # Safety
//
// `id` and `ood` must be live score-set pointers; `value_out` and
// `threshold_out` must be valid pointers.
enum OodevalStatus oodeval_rate_at_level(const struct OodevalScoreSet *id,
                                         const struct OodevalScoreSet *ood,
                                         enum OodevalRateQuery query,
                                         double level,
                                         double *value_out,
                                         double *threshold_out);

// Crossing point of the FPR/FNR curves on the unique-scores grid.
//
// # Safety
//
// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
enum OodevalStatus oodeval_crossing_threshold(const struct OodevalScoreSet *id,
                                              const struct OodevalScoreSet *ood,
                                              struct OodevalCrossing *out);

// Full metric report of one pair as a JSON string; free the string with
// [`oodeval_string_free`]. Default convention and rule, no thresholds.
//
// # Safety
//
// `id` and `ood` must be live score-set pointers, `json_out` a valid
// pointer.
enum OodevalStatus oodeval_evaluate_pair_json(const struct OodevalScoreSet *id,
                                              const struct OodevalScoreSet *ood,
                                              double weight_fpr,
                                              enum OodevalIntegration integration,
                                              char **json_out);

// Samples a built-in preset pair into two new score sets. The OOD side
// uses `seed + 1`.
//
// # Safety
//
// `preset` must be a NUL-terminated string; `id_out` and `ood_out` must
// be valid pointers.
enum OodevalStatus oodeval_preset_sample(const char *preset,
                                         size_t n,
                                         uint64_t seed,
                                         struct OodevalScoreSet **id_out,
                                         struct OodevalScoreSet **ood_out);

// Frees a string returned by this library. Null is a no-op.
//
// # Safety
//
// `s` must be null or a string pointer obtained from this library that
// has not been freed yet.
void oodeval_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OODEVAL_H */
