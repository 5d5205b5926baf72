/* C interface to the refgame toolkit. Strings returned through out-parameters are UTF-8, NUL-terminated, and must be released with rg_string_free. */

#pragma once

/* Generated with cbindgen:0.26.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Vote rule for repeated games.
enum RgRepetitionMode {
  RG_REPETITION_MODE_UNANIMOUS_ACCEPT = 0,
  RG_REPETITION_MODE_UNANIMOUS_REJECT = 1,
};
typedef int32_t RgRepetitionMode;

// Status codes returned by every fallible entry point.
enum RgStatus {
  RG_STATUS_OK = 0,
  // A required pointer argument was NULL.
  RG_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  RG_STATUS_INVALID_UTF8 = 2,
  // JSON did not parse or violated a type invariant.
  RG_STATUS_PARSE_ERROR = 3,
  // A parameter was out of range for the requested operation.
  RG_STATUS_INVALID_ARGUMENT = 4,
  // Operator or channel dimensions do not line up.
  RG_STATUS_DIMENSION_MISMATCH = 5,
  // The solver hit its iteration cap; partial output was still written.
  RG_STATUS_NO_CONVERGENCE = 6,
  // A tensor-power construction exceeded the size budget.
  RG_STATUS_TOO_LARGE = 7,
  // Anything else; see rg_last_error_message.
  RG_STATUS_INTERNAL = 8,
};
typedef int32_t RgStatus;

// Opaque game instance handle.
typedef struct RgInstance RgInstance;

// Solver knobs mirrored across the ABI.
typedef struct RgRunConfig {
  // Duality-gap tolerance (default 1e-3).
  double gap_tol;
  // Iteration cap (default 200000).
  uint64_t max_iters;
  // Subgradient step scale (default 1.0).
  double step_scale;
  // Seed for randomized components (default 42).
  uint64_t seed;
} RgRunConfig;

// Outcome of a Monte Carlo run.
typedef struct RgPlayStats {
  uint64_t rounds;
  uint64_t accepts;
  double frequency;
  double exact;
} RgPlayStats;

// Library version as a static string; do not free.
const char *rg_version(void);

// Static name of a status code; do not free.
const char *rg_status_name(RgStatus status);

// Message of the most recent failure on this thread, or NULL if none.
// The pointer is valid until the next failing call on the same thread;
// do not free.
const char *rg_last_error_message(void);

// Fill a config with the library defaults.
// # Safety
// `out` must be valid for writing one `RgRunConfig`.
RgStatus rg_run_config_default(struct RgRunConfig *out);

// Generate an instance. `kind` is one of "yes-identical",
// "yes-shared-image" (param unused, `dim` used), "no-constant-pair"
// (param = angle in radians), "no-diag-pair" (param = delta).
// On success `*out` owns the handle; free with `rg_instance_free`.
// # Safety
// `kind` must be a valid NUL-terminated string and `out` valid for
// writing one pointer.
RgStatus rg_instance_generate(const char *kind,
                              double param,
                              uint64_t dim,
                              uint64_t seed,
                              struct RgInstance **out);

// Parse an instance from JSON. On success `*out` owns the handle.
// # Safety
// `json` must be a valid NUL-terminated string and `out` valid for
// writing one pointer.
RgStatus rg_instance_from_json(const char *json, struct RgInstance **out);

// Serialize an instance to JSON; release the string with `rg_string_free`.
// # Safety
// `instance` must be a live handle from this library and `out` valid for
// writing one pointer.
RgStatus rg_instance_to_json(const struct RgInstance *instance, char **out);

// Input and output dimensions of an instance's channels.
// # Safety
// `instance` must be a live handle; `dim_in` and `dim_out` must be valid
// for writing.
RgStatus rg_instance_dims(const struct RgInstance *instance, uint64_t *dim_in, uint64_t *dim_out);

// Promised fidelity-squared bound ε of an instance.
// # Safety
// `instance` must be a live handle and `epsilon` valid for writing.
RgStatus rg_instance_epsilon(const struct RgInstance *instance, double *epsilon);

// Release an instance handle. NULL is ignored.
//
// # Safety
// `instance` must have come from this library and not been freed already.
void rg_instance_free(struct RgInstance *instance);

// Solve the image separation and return the result record as JSON.
// On `RG_STATUS_NO_CONVERGENCE` the partial result is still written.
// # Safety
// `instance` must be a live handle, `cfg` NULL or valid for reading, and
// `out` valid for writing one pointer.
RgStatus rg_separate_json(const struct RgInstance *instance,
                          const struct RgRunConfig *cfg,
                          char **out);

// Compute the game value report as JSON. On `RG_STATUS_NO_CONVERGENCE`
// the partial separation record is written instead.
// # Safety
// `instance` must be a live handle, `cfg` NULL or valid for reading, and
// `out` valid for writing one pointer.
RgStatus rg_game_value_json(const struct RgInstance *instance,
                            const struct RgRunConfig *cfg,
                            char **out);

// Parallel-repetition report as JSON.
// # Safety
// `instance` must be a live handle, `cfg` NULL or valid for reading, and
// `out` valid for writing one pointer.
RgStatus rg_repetition_json(const struct RgInstance *instance,
                            uint64_t k,
                            RgRepetitionMode mode,
                            const struct RgRunConfig *cfg,
                            char **out);

// Monte Carlo rounds at the computed equilibrium.
// # Safety
// `instance` must be a live handle, `cfg` NULL or valid for reading, and
// `out` valid for writing one `RgPlayStats`.
RgStatus rg_play(const struct RgInstance *instance,
                 uint64_t rounds,
                 uint64_t seed,
                 const struct RgRunConfig *cfg,
                 struct RgPlayStats *out);

// Run the full property suite; the rendered table is returned through
// `out_table`. Returns `RG_STATUS_OK` only when every check passed.
// # Safety
// `out_table` must be valid for writing one pointer.
RgStatus rg_selftest(uint64_t seed, char **out_table);

// Release a string allocated by this library. NULL is ignored.
//
// # Safety
// `s` must have come from this library and not been freed already.
void rg_string_free(char *s);
