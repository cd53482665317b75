#ifndef QFL_SIM_H
#define QFL_SIM_H

/* Generated by cbindgen from qfl-sim-ffi; regenerate with `cargo build -p qfl-sim-ffi`. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Call outcome. Mirrors the CLI exit-code split between configuration
 * errors and runtime aborts.
 */
typedef enum QflStatus {
  QFL_STATUS_OK = 0,
  QFL_STATUS_NULL_ARGUMENT = 1,
  QFL_STATUS_INVALID_CONFIG = 2,
  QFL_STATUS_RUNTIME_ABORT = 3,
  QFL_STATUS_IO = 4,
} QflStatus;

/**
 * Metric columns addressable through [`qfl_metrics_value`]; the time
 * columns are wall-clock and not reproducible across runs.
 */
typedef enum QflMetricColumn {
  QFL_METRIC_COLUMN_GLOBAL_FT_VAL_ACC = 0,
  QFL_METRIC_COLUMN_GLOBAL_FT_TEST_ACC = 1,
  QFL_METRIC_COLUMN_GLOBAL_FT_VAL_LOSS = 2,
  QFL_METRIC_COLUMN_PRED_TEST_ACC = 3,
  QFL_METRIC_COLUMN_PRED_VAL_ACC = 4,
  QFL_METRIC_COLUMN_PRED_VAL_LOSS = 5,
  QFL_METRIC_COLUMN_AVG_LOCAL_TRAIN_ACC = 6,
  QFL_METRIC_COLUMN_AVG_LOCAL_TEST_ACC = 7,
  QFL_METRIC_COLUMN_AVG_LOCAL_TRAIN_LOSS = 8,
  QFL_METRIC_COLUMN_AVG_LOCAL_TRAIN_TIME_S = 9,
  QFL_METRIC_COLUMN_COMM_TIME_S = 10,
} QflMetricColumn;

/**
 * Adversary selector for [`qfl_bb84_demo`].
 */
typedef enum QflEve {
  QFL_EVE_NONE = 0,
  QFL_EVE_INTERCEPT_RESEND = 1,
  QFL_EVE_SWAP = 2,
  QFL_EVE_HALF_SWAP = 3,
} QflEve;

typedef enum QflDpMechanism {
  QFL_DP_MECHANISM_LAPLACE = 0,
  QFL_DP_MECHANISM_GAUSSIAN = 1,
} QflDpMechanism;

/**
 * Opaque experiment configuration handle.
 */
typedef struct QflConfig QflConfig;

/**
 * Opaque per-round metrics handle.
 */
typedef struct QflMetrics QflMetrics;

/**
 * Result summary of one BB84 demo exchange.
 */
typedef struct QflQkdSummary {
  size_t transmitted_qubits;
  size_t sifted_bits;
  size_t tested_bits;
  size_t error_count;
  double sift_fraction;
  double qber;
  /**
   * 1 when the test-bit comparison stayed within `n_allowed`.
   */
  uint8_t passed;
} QflQkdSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qfl_version(void);

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qfl_last_error(void);

/**
 * Load and validate an experiment config from a TOML file. Returns NULL on
 * failure (see [`qfl_last_error`]). Free with [`qfl_config_free`].
 *
 * # Safety
 * `path` must be a NUL-terminated string valid for the call.
 */
struct QflConfig *qfl_config_load(const char *path);

/**
 * Parse and validate an experiment config from TOML text. Returns NULL on
 * failure. Free with [`qfl_config_free`].
 *
 * # Safety
 * `text` must be a NUL-terminated string valid for the call.
 */
struct QflConfig *qfl_config_from_toml(const char *text);

/**
 * Clone a config with the device count replaced (sweep expansion).
 *
 * # Safety
 * `config` must be a live pointer from a `qfl_config_*` constructor.
 */
struct QflConfig *qfl_config_with_devices(const struct QflConfig *config, size_t devices);

/**
 * # Safety
 * `config` must be NULL or a pointer from a `qfl_config_*` constructor,
 * not yet freed.
 */
void qfl_config_free(struct QflConfig *config);

/**
 * Run the experiment described by `config` and hand back a metrics handle
 * through `out`. The config must carry a single device count.
 *
 * # Safety
 * `config` must be a live config pointer; `out` must be a valid location
 * to store the handle.
 */
enum QflStatus qfl_run(const struct QflConfig *config, struct QflMetrics **out);

/**
 * Number of completed rounds in a metrics handle.
 *
 * # Safety
 * `metrics` must be NULL or a live pointer from [`qfl_run`].
 */
size_t qfl_metrics_rounds(const struct QflMetrics *metrics);

/**
 * Fetch one metric value by round index (0-based) and column.
 *
 * # Safety
 * `metrics` must be a live pointer from [`qfl_run`]; `out` must be valid
 * for one f64 write.
 */
enum QflStatus qfl_metrics_value(const struct QflMetrics *metrics,
                                 size_t round_index,
                                 enum QflMetricColumn column,
                                 double *out);

/**
 * Write the metrics CSV (fixed header, 6-decimal floats) to `path`.
 *
 * # Safety
 * `metrics` must be a live pointer from [`qfl_run`]; `path` must be a
 * NUL-terminated string.
 */
enum QflStatus qfl_metrics_write_csv(const struct QflMetrics *metrics, const char *path);

/**
 * # Safety
 * `metrics` must be NULL or a pointer from [`qfl_run`], not yet freed.
 */
void qfl_metrics_free(struct QflMetrics *metrics);

/**
 * One seeded BB84 exchange plus test-bit verification.
 *
 * # Safety
 * `out` must be valid for one [`QflQkdSummary`] write.
 */
enum QflStatus qfl_bb84_demo(size_t num_qubits,
                             enum QflEve eve,
                             uint64_t eve_seed,
                             double flip_probability,
                             double test_fraction,
                             size_t n_allowed,
                             uint64_t seed,
                             struct QflQkdSummary *out);

/**
 * Calibrated DP noise scale; `delta` is ignored by the Laplace mechanism.
 *
 * # Safety
 * `out` must be valid for one f64 write.
 */
enum QflStatus qfl_dp_noise_scale(enum QflDpMechanism mechanism,
                                  double epsilon,
                                  double delta,
                                  double sensitivity,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFL_SIM_H */
