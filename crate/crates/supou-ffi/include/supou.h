#ifndef SUPOU_H
#define SUPOU_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every FFI call.
 */
typedef enum SupouStatus {
  SupouStatus_Ok = 0,
  /**
   * Invalid parameters, malformed JSON, or a null argument.
   */
  SupouStatus_InvalidArgument = 1,
  /**
   * The model sits on a regime boundary; no limit theorem applies.
   */
  SupouStatus_BoundaryRegime = 2,
  /**
   * Simulation failure.
   */
  SupouStatus_SimulationFailed = 3,
  /**
   * A numerical routine failed to converge.
   */
  SupouStatus_NumericalFailure = 4,
  /**
   * Internal serialization error.
   */
  SupouStatus_Internal = 5,
} SupouStatus;

/**
 * Opaque model handle: a validated characteristic quadruple.
 */
typedef struct SupouModel SupouModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if the last
 * call succeeded. The pointer is owned by the library and valid until the
 * next failing call on the same thread.
 */
const char *supou_last_error(void);

/**
 * Create a model from the JSON `model` block (drift, gaussian_b,
 * levy_measure, mixing). On success writes an owned handle to `out`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. The handle must be released with `supou_model_free`.
 */
enum SupouStatus supou_model_from_json(const char *json, struct SupouModel **out);

/**
 * Release a model handle. Null is a no-op.
 *
 * # Safety
 * `model` must be null or a pointer returned by `supou_model_from_json`
 * that has not been freed yet.
 */
void supou_model_free(struct SupouModel *model);

/**
 * Release a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer produced by a supou call that has not been
 * freed yet.
 */
void supou_string_free(char *s);

/**
 * Classify the long-horizon regime of a model. Writes the regime report as
 * JSON to `report_json`. Returns `BoundaryRegime` (with the report still
 * written) when the parameters sit on a boundary set.
 *
 * # Safety
 * `model` must be a live handle; `report_json` must be a valid pointer.
 */
enum SupouStatus supou_model_classify(const struct SupouModel *model, char **report_json);

/**
 * Classify from bare exponents without building a model. `beta` also
 * accepts a Blumenthal-Getoor index; `gaussian` is 0 or nonzero.
 *
 * # Safety
 * `report_json` must be a valid pointer.
 */
enum SupouStatus supou_classify_exponents(double gamma,
                                          double alpha,
                                          double beta,
                                          int32_t gaussian,
                                          char **report_json);

/**
 * Evaluate the stationary marginal cumulant of the model at `zeta`.
 *
 * # Safety
 * `model` must be a live handle; `re` and `im` must be valid pointers.
 */
enum SupouStatus supou_model_marginal_cumulant(const struct SupouModel *model,
                                               double zeta,
                                               double *re,
                                               double *im);

/**
 * Run a path ensemble described by the JSON `simulation` block (t_ladder,
 * grid_step, superposition_count, replications, optional cutoff/burn_in).
 * Writes the ensemble CSV (replication, component, t, x, xstar) to
 * `csv_out`.
 *
 * # Safety
 * `model` must be a live handle; `sim_json` a valid NUL-terminated string;
 * `csv_out` a valid pointer.
 */
enum SupouStatus supou_model_simulate_csv(const struct SupouModel *model,
                                          const char *sim_json,
                                          uint64_t seed,
                                          char **csv_out);

/**
 * Run the verification suite using the JSON `simulation` block and default
 * thresholds; writes the VerificationReport JSON to `report_json`.
 *
 * # Safety
 * Same contracts as `supou_model_simulate_csv`.
 */
enum SupouStatus supou_model_verify(const struct SupouModel *model,
                                    const char *sim_json,
                                    uint64_t seed,
                                    char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPOU_H */
