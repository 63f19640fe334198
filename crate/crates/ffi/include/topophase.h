#ifndef TOPOPHASE_H
#define TOPOPHASE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every `tp_*` function.
 */
typedef enum TpStatus {
  TP_STATUS_OK = 0,
  TP_STATUS_NULL_POINTER = 1,
  TP_STATUS_INVALID_UTF8 = 2,
  TP_STATUS_PARSE = 3,
  TP_STATUS_VALIDATION = 4,
  TP_STATUS_UNKNOWN_PATH = 5,
  TP_STATUS_NUMERICAL = 6,
  TP_STATUS_UNTRANSLATABLE = 7,
  TP_STATUS_INVALID_ARGUMENT = 8,
  TP_STATUS_PANIC = 9,
} TpStatus;

typedef enum TpClassification {
  TP_CLASSIFICATION_TOPOLOGICAL = 0,
  TP_CLASSIFICATION_DYNAMICAL_CONTAMINATED = 1,
  TP_CLASSIFICATION_TRIVIAL = 2,
  TP_CLASSIFICATION_NON_TOPOLOGICAL = 3,
} TpClassification;

/**
 * Opaque scenario handle.
 */
typedef struct TpScenario TpScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a scenario from `len` bytes of JSON.
 *
 * # Safety
 * `json` must point to `len` readable bytes; `out` must be writable.
 */
enum TpStatus tp_scenario_parse(const uint8_t *json, size_t len, struct TpScenario **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tp_scenario_free(struct TpScenario *s);

/**
 * Serialises a scenario back to JSON.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum TpStatus tp_scenario_to_json(const struct TpScenario *s, char **out);

/**
 * Phase accumulated along the named path. `tol <= 0` selects the default
 * tolerance. `abs_error` may be null.
 *
 * # Safety
 * Pointers must be valid; `path` must be NUL-terminated.
 */
enum TpStatus tp_line_phase(const struct TpScenario *s,
                            const char *path,
                            double tol,
                            double *value,
                            double *abs_error);

/**
 * Runs the topology checks. The JSON report is written to `report_json`
 * (may be null) and the verdict to `classification` (may be null).
 *
 * # Safety
 * Pointers must be valid or null where allowed.
 */
enum TpStatus tp_check_json(const struct TpScenario *s,
                            char **report_json,
                            enum TpClassification *classification);

/**
 * Electric/magnetic dual of a scenario, as a new handle.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum TpStatus tp_duality(const struct TpScenario *s, struct TpScenario **out);

/**
 * Relativistic induced-dipole Lagrangian for lab fields `e`, `b` and
 * velocity `v` (each three doubles).
 *
 * # Safety
 * `e`, `b`, `v` must point to three doubles; `out` must be writable.
 */
enum TpStatus tp_rel_lagrangian(const double *e,
                                const double *b,
                                const double *v,
                                double alpha,
                                double *out);

/**
 * Lab-frame spin four-vector `(t, x, y, z)` for rest-frame spin `s` and
 * velocity `v`.
 *
 * # Safety
 * `s`, `v` must point to three doubles; `out` to four writable doubles.
 */
enum TpStatus tp_boost_spin(const double *s, const double *v, double *out);

/**
 * Message of the last failure on this thread, or null. Owned by the
 * library; valid until the next `tp_*` call on the same thread.
 */
const char *tp_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPOPHASE_H */
