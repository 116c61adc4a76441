/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the movable-subarray beamforming library.
 *
 * Every handle is opaque and owned by the caller once created; release it
 * with the matching *_destroy function. Functions return an msbf_status and
 * record a human-readable message retrievable with msbf_last_error() on the
 * calling thread.
 */
#ifndef MSBF_MSBF_H
#define MSBF_MSBF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MSBF_API __declspec(dllexport)
#else
#define MSBF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msbf_status {
  MSBF_OK = 0,
  MSBF_ERR_CONFIG = 1,       /* invalid key, value or invariant */
  MSBF_ERR_GEOMETRY = 2,     /* geometry cannot be evaluated */
  MSBF_ERR_SOLVER = 3,       /* numerical failure */
  MSBF_ERR_IO = 4,           /* file could not be read or written */
  MSBF_ERR_INVALID_ARG = 5,  /* null handle, index out of range, ... */
  MSBF_ERR_INTERNAL = 6
} msbf_status;

typedef struct msbf_config msbf_config;
typedef struct msbf_result msbf_result;
typedef struct msbf_oracle_set msbf_oracle_set;

typedef struct msbf_row {
  const char* experiment; /* valid while the result handle lives */
  const char* scheme;
  int trial;
  uint64_t seed;
  double sweep_value;
  int iteration;
  double sum_rate;
  int has_sum_rate_exact;
  double sum_rate_exact;
  int has_wall_ms;
  double wall_ms;
} msbf_row;

typedef struct msbf_oracle_report {
  const char* name; /* valid while the oracle set lives */
  double value;
  double threshold;
  int passed;
  int gating;
  const char* detail;
} msbf_oracle_report;

MSBF_API const char* msbf_status_string(msbf_status status);
/* Message of the last failed call on this thread; "" if none. */
MSBF_API const char* msbf_last_error(void);

/* Configuration: starts from the full-scale defaults. */
MSBF_API msbf_status msbf_config_create(msbf_config** out);
MSBF_API void msbf_config_destroy(msbf_config* config);
/* "full" or "desk"; replaces every field. */
MSBF_API msbf_status msbf_config_apply_preset(msbf_config* config, const char* name);
/* Flat "key = value" file applied on top of the current values. */
MSBF_API msbf_status msbf_config_load_file(msbf_config* config, const char* path);
MSBF_API msbf_status msbf_config_set(msbf_config* config, const char* key, const char* value);
MSBF_API msbf_status msbf_config_validate(const msbf_config* config);
/* Canonical dump. Copies at most `capacity` bytes including the terminator
 * and stores the full length (without terminator) in *needed if non-null. */
MSBF_API msbf_status msbf_config_to_string(const msbf_config* config, char* buffer, size_t capacity,
                                           size_t* needed);
/* Output paths the CLI writes to. */
MSBF_API msbf_status msbf_config_output_paths(const msbf_config* config, char* csv, size_t csv_capacity,
                                              char* summary, size_t summary_capacity);

/* Runs the configured experiment; *out receives a new result handle. */
MSBF_API msbf_status msbf_experiment_run(const msbf_config* config, msbf_result** out);
MSBF_API void msbf_result_destroy(msbf_result* result);
MSBF_API size_t msbf_result_row_count(const msbf_result* result);
MSBF_API msbf_status msbf_result_row(const msbf_result* result, size_t index, msbf_row* out);
MSBF_API int msbf_result_admm_soft_stops(const msbf_result* result);
MSBF_API msbf_status msbf_result_write_csv(const msbf_result* result, const char* path);
MSBF_API msbf_status msbf_result_write_summary(const msbf_result* result, const char* path);
MSBF_API msbf_status msbf_result_summary_json(const msbf_result* result, char* buffer, size_t capacity,
                                              size_t* needed);

/* Brute-force reference checks on tiny instances. */
MSBF_API msbf_status msbf_oracle_run(uint64_t seed, msbf_oracle_set** out);
MSBF_API void msbf_oracle_destroy(msbf_oracle_set* set);
MSBF_API size_t msbf_oracle_count(const msbf_oracle_set* set);
MSBF_API msbf_status msbf_oracle_get(const msbf_oracle_set* set, size_t index, msbf_oracle_report* out);

#ifdef __cplusplus
}
#endif

#endif /* MSBF_MSBF_H */
