// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msbf/msbf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

int exit_code(msbf_status status) {
  switch (status) {
    case MSBF_OK: return kExitOk;
    case MSBF_ERR_CONFIG: return kExitConfig;
    case MSBF_ERR_GEOMETRY:
    case MSBF_ERR_SOLVER: return kExitSolver;
    default: return kExitOther;
  }
}

int report(msbf_status status, const char* what) {
  std::fprintf(stderr, "msbf: %s: %s: %s\n", what, msbf_status_string(status), msbf_last_error());
  return exit_code(status);
}

struct ConfigDeleter {
  void operator()(msbf_config* c) const { msbf_config_destroy(c); }
};
struct ResultDeleter {
  void operator()(msbf_result* r) const { msbf_result_destroy(r); }
};
struct OracleDeleter {
  void operator()(msbf_oracle_set* s) const { msbf_oracle_destroy(s); }
};
using ConfigPtr = std::unique_ptr<msbf_config, ConfigDeleter>;

struct Flags {
  std::string preset;
  std::string config;
  std::string out;
  std::string scheme;
  std::vector<std::string> sets;
  long long seed = -1;
  int trials = -1;
  int workers = -1;
};

void add_config_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--preset", f.preset, "Start from a preset: full or desk");
  cmd->add_option("--config", f.config, "Flat key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "CSV output path (summary JSON goes next to it)");
  cmd->add_option("--seed", f.seed, "Base seed; trial t uses seed + t")->check(CLI::NonNegativeNumber);
  cmd->add_option("--trials", f.trials, "Number of Monte Carlo trials");
  cmd->add_option("--scheme", f.scheme, "Comma-separated schemes: proposed,sparse_upa,dense_upa,exhaustive");
  cmd->add_option("--workers", f.workers, "Concurrent trials (0: all cores)");
  cmd->add_option("--set", f.sets, "Extra key=value overrides, applied last")->allow_extra_args(false);
}

// Preset, then file, then individual flags.
msbf_status build_config(const Flags& f, ConfigPtr& out) {
  msbf_config* raw = nullptr;
  if (auto s = msbf_config_create(&raw); s != MSBF_OK) return s;
  out.reset(raw);
  msbf_status s = MSBF_OK;
  if (!f.preset.empty() && (s = msbf_config_apply_preset(raw, f.preset.c_str())) != MSBF_OK) return s;
  if (!f.config.empty() && (s = msbf_config_load_file(raw, f.config.c_str())) != MSBF_OK) return s;
  auto set = [&](const char* key, const std::string& value) { return msbf_config_set(raw, key, value.c_str()); };
  if (!f.out.empty() && (s = set("output", f.out)) != MSBF_OK) return s;
  if (f.seed >= 0 && (s = set("base_seed", std::to_string(f.seed))) != MSBF_OK) return s;
  if (f.trials >= 0 && (s = set("trials", std::to_string(f.trials))) != MSBF_OK) return s;
  if (!f.scheme.empty() && (s = set("schemes", f.scheme)) != MSBF_OK) return s;
  if (f.workers >= 0 && (s = set("workers", std::to_string(f.workers))) != MSBF_OK) return s;
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "msbf: --set expects key=value, got '%s'\n", kv.c_str());
      return MSBF_ERR_CONFIG;
    }
    if ((s = set(kv.substr(0, eq).c_str(), kv.substr(eq + 1))) != MSBF_OK) return s;
  }
  return msbf_config_validate(raw);
}

std::string config_text(const msbf_config* config) {
  size_t needed = 0;
  msbf_config_to_string(config, nullptr, 0, &needed);
  std::string text(needed + 1, '\0');
  msbf_config_to_string(config, text.data(), text.size(), &needed);
  text.resize(needed);
  return text;
}

int cmd_run(const Flags& f, bool quiet) {
  ConfigPtr config;
  if (auto s = build_config(f, config); s != MSBF_OK) return report(s, "config");
  char csv[4096], summary[4096];
  msbf_config_output_paths(config.get(), csv, sizeof csv, summary, sizeof summary);

  msbf_result* raw = nullptr;
  if (auto s = msbf_experiment_run(config.get(), &raw); s != MSBF_OK) return report(s, "run");
  std::unique_ptr<msbf_result, ResultDeleter> result(raw);
  if (auto s = msbf_result_write_csv(raw, csv); s != MSBF_OK) return report(s, "write csv");
  if (auto s = msbf_result_write_summary(raw, summary); s != MSBF_OK) return report(s, "write summary");
  if (!quiet)
    std::printf("wrote %zu rows to %s and summary to %s (%d ADMM soft stops)\n", msbf_result_row_count(raw), csv,
                summary, msbf_result_admm_soft_stops(raw));
  return kExitOk;
}

int cmd_validate(const Flags& f) {
  ConfigPtr config;
  const auto s = build_config(f, config);
  if (s != MSBF_OK) return report(s, "config");
  std::fputs(config_text(config.get()).c_str(), stdout);
  return kExitOk;
}

int cmd_oracle(long long seed) {
  msbf_oracle_set* raw = nullptr;
  if (auto s = msbf_oracle_run(static_cast<uint64_t>(seed), &raw); s != MSBF_OK) return report(s, "oracle");
  std::unique_ptr<msbf_oracle_set, OracleDeleter> set(raw);
  bool ok = true;
  for (size_t i = 0; i < msbf_oracle_count(raw); ++i) {
    msbf_oracle_report r{};
    msbf_oracle_get(raw, i, &r);
    const char* verdict = r.passed ? "PASS" : (r.gating ? "FAIL" : "INFO");
    std::printf("%s %s value=%.6g threshold=%.6g  %s\n", verdict, r.name, r.value, r.threshold, r.detail);
    ok = ok && (r.passed || !r.gating);
  }
  return ok ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-subarray hybrid beamforming experiments"};
  app.require_subcommand(1);

  Flags run_flags, validate_flags;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment and write CSV + JSON summary");
  add_config_flags(run, run_flags);
  run->add_flag("-q,--quiet", quiet, "No progress line");

  auto* validate = app.add_subcommand("validate", "Check a configuration and print it in canonical form");
  add_config_flags(validate, validate_flags);

  long long oracle_seed = 1;
  auto* oracle = app.add_subcommand("oracle", "Run the brute-force reference checks on tiny instances");
  oracle->add_option("--seed", oracle_seed, "Seed for the random instances")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return cmd_run(run_flags, quiet);
  if (*validate) return cmd_validate(validate_flags);
  if (*oracle) return cmd_oracle(oracle_seed);
  return kExitOther;
}
