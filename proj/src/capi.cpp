// SPDX-License-Identifier: Apache-2.0

#include "msbf/msbf.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "msbf/harness.hpp"
#include "msbf/oracles.hpp"

struct msbf_config {
  msbf::ExperimentConfig value;
};

struct msbf_result {
  msbf::ExperimentResult value;
};

struct msbf_oracle_set {
  std::vector<msbf::OracleReport> reports;
};

namespace {

thread_local std::string last_error;

msbf_status fail(msbf_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `fn`, mapping exceptions onto status codes.
template <typename Fn>
msbf_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return MSBF_OK;
  } catch (const msbf::ConfigError& e) {
    return fail(MSBF_ERR_CONFIG, e.what());
  } catch (const msbf::GeometryError& e) {
    return fail(MSBF_ERR_GEOMETRY, e.what());
  } catch (const msbf::SolverError& e) {
    return fail(MSBF_ERR_SOLVER, e.what());
  } catch (const msbf::Error& e) {
    return fail(MSBF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MSBF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MSBF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MSBF_ERR_INTERNAL, "unknown error");
  }
}

msbf_status copy_out(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size();
  if (buffer && capacity > 0) {
    const size_t n = std::min(capacity - 1, text.size());
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
  }
  return MSBF_OK;
}

}  // namespace

extern "C" {

const char* msbf_status_string(msbf_status status) {
  switch (status) {
    case MSBF_OK: return "ok";
    case MSBF_ERR_CONFIG: return "configuration error";
    case MSBF_ERR_GEOMETRY: return "geometry error";
    case MSBF_ERR_SOLVER: return "solver error";
    case MSBF_ERR_IO: return "i/o error";
    case MSBF_ERR_INVALID_ARG: return "invalid argument";
    case MSBF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* msbf_last_error(void) { return last_error.c_str(); }

msbf_status msbf_config_create(msbf_config** out) {
  if (!out) return fail(MSBF_ERR_INVALID_ARG, "msbf_config_create: null output pointer");
  return guarded([&] { *out = new msbf_config{}; });
}

void msbf_config_destroy(msbf_config* config) { delete config; }

msbf_status msbf_config_apply_preset(msbf_config* config, const char* name) {
  if (!config || !name) return fail(MSBF_ERR_INVALID_ARG, "msbf_config_apply_preset: null argument");
  return guarded([&] { config->value = msbf::preset(name); });
}

msbf_status msbf_config_load_file(msbf_config* config, const char* path) {
  if (!config || !path) return fail(MSBF_ERR_INVALID_ARG, "msbf_config_load_file: null argument");
  return guarded([&] { config->value = msbf::load_config(path, config->value); });
}

msbf_status msbf_config_set(msbf_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(MSBF_ERR_INVALID_ARG, "msbf_config_set: null argument");
  return guarded([&] {
    if (std::strcmp(key, "preset") == 0)
      config->value = msbf::preset(value);
    else
      msbf::apply_setting(config->value, key, value);
  });
}

msbf_status msbf_config_validate(const msbf_config* config) {
  if (!config) return fail(MSBF_ERR_INVALID_ARG, "msbf_config_validate: null handle");
  return guarded([&] { config->value.validate(); });
}

msbf_status msbf_config_to_string(const msbf_config* config, char* buffer, size_t capacity, size_t* needed) {
  if (!config) return fail(MSBF_ERR_INVALID_ARG, "msbf_config_to_string: null handle");
  std::string text;
  const auto status = guarded([&] { text = msbf::format_config(config->value); });
  return status == MSBF_OK ? copy_out(text, buffer, capacity, needed) : status;
}

msbf_status msbf_config_output_paths(const msbf_config* config, char* csv, size_t csv_capacity, char* summary,
                                     size_t summary_capacity) {
  if (!config) return fail(MSBF_ERR_INVALID_ARG, "msbf_config_output_paths: null handle");
  copy_out(config->value.output, csv, csv_capacity, nullptr);
  copy_out(config->value.summary_path(), summary, summary_capacity, nullptr);
  return MSBF_OK;
}

msbf_status msbf_experiment_run(const msbf_config* config, msbf_result** out) {
  if (!config || !out) return fail(MSBF_ERR_INVALID_ARG, "msbf_experiment_run: null argument");
  *out = nullptr;
  return guarded([&] { *out = new msbf_result{msbf::run_experiment(config->value)}; });
}

void msbf_result_destroy(msbf_result* result) { delete result; }

size_t msbf_result_row_count(const msbf_result* result) { return result ? result->value.rows.size() : 0; }

msbf_status msbf_result_row(const msbf_result* result, size_t index, msbf_row* out) {
  if (!result || !out) return fail(MSBF_ERR_INVALID_ARG, "msbf_result_row: null argument");
  if (index >= result->value.rows.size()) return fail(MSBF_ERR_INVALID_ARG, "msbf_result_row: index out of range");
  const auto& r = result->value.rows[index];
  out->experiment = r.experiment.c_str();
  out->scheme = r.scheme.c_str();
  out->trial = r.trial;
  out->seed = r.seed;
  out->sweep_value = r.sweep_value;
  out->iteration = r.iteration;
  out->sum_rate = r.sum_rate;
  out->has_sum_rate_exact = r.sum_rate_exact.has_value();
  out->sum_rate_exact = r.sum_rate_exact.value_or(0.0);
  out->has_wall_ms = r.wall_ms.has_value();
  out->wall_ms = r.wall_ms.value_or(0.0);
  return MSBF_OK;
}

int msbf_result_admm_soft_stops(const msbf_result* result) { return result ? result->value.admm_soft_stops : 0; }

msbf_status msbf_result_write_csv(const msbf_result* result, const char* path) {
  if (!result || !path) return fail(MSBF_ERR_INVALID_ARG, "msbf_result_write_csv: null argument");
  return guarded([&] { msbf::emit_csv(result->value.rows, std::string(path)); });
}

msbf_status msbf_result_write_summary(const msbf_result* result, const char* path) {
  if (!result || !path) return fail(MSBF_ERR_INVALID_ARG, "msbf_result_write_summary: null argument");
  return guarded([&] { msbf::write_summary(result->value, path); });
}

msbf_status msbf_result_summary_json(const msbf_result* result, char* buffer, size_t capacity, size_t* needed) {
  if (!result) return fail(MSBF_ERR_INVALID_ARG, "msbf_result_summary_json: null handle");
  std::string text;
  const auto status = guarded([&] { text = msbf::summary_json(result->value); });
  return status == MSBF_OK ? copy_out(text, buffer, capacity, needed) : status;
}

msbf_status msbf_oracle_run(uint64_t seed, msbf_oracle_set** out) {
  if (!out) return fail(MSBF_ERR_INVALID_ARG, "msbf_oracle_run: null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new msbf_oracle_set{msbf::run_all_oracles(seed)}; });
}

void msbf_oracle_destroy(msbf_oracle_set* set) { delete set; }

size_t msbf_oracle_count(const msbf_oracle_set* set) { return set ? set->reports.size() : 0; }

msbf_status msbf_oracle_get(const msbf_oracle_set* set, size_t index, msbf_oracle_report* out) {
  if (!set || !out) return fail(MSBF_ERR_INVALID_ARG, "msbf_oracle_get: null argument");
  if (index >= set->reports.size()) return fail(MSBF_ERR_INVALID_ARG, "msbf_oracle_get: index out of range");
  const auto& r = set->reports[index];
  out->name = r.name.c_str();
  out->value = r.value;
  out->threshold = r.threshold;
  out->passed = r.passed ? 1 : 0;
  out->gating = r.gating ? 1 : 0;
  out->detail = r.detail.c_str();
  return MSBF_OK;
}

}  // extern "C"
