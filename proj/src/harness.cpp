// SPDX-License-Identifier: Apache-2.0

#include "msbf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace msbf {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  const long long v = to_integer(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError("config: key '" + key + "' is out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: key '" + key + "' expects true or false, got '" + value + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
  return out;
}

// Shortest text that parses back to the same double.
std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += number(values[i]);
  }
  return out;
}

std::string sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool perfect_square(int v) {
  if (v < 1) return false;
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v))));
  return r * r == v;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "convergence") c.experiment = Experiment::kConvergence;
         else if (v == "region_sweep") c.experiment = Experiment::kRegionSweep;
         else if (v == "power_sweep") c.experiment = Experiment::kPowerSweep;
         else if (v == "single") c.experiment = Experiment::kSingle;
         else throw ConfigError("config: key '" + k + "' must be convergence, region_sweep, power_sweep or single");
       }},
      {"carrier_frequency_hz", [](auto& c, auto& k, auto& v) { c.carrier_frequency_hz = to_double(k, v); }},
      {"M", [](auto& c, auto& k, auto& v) { c.M = to_int(k, v); }},
      {"N", [](auto& c, auto& k, auto& v) { c.N = to_int(k, v); }},
      {"K", [](auto& c, auto& k, auto& v) { c.K = to_int(k, v); }},
      {"Np", [](auto& c, auto& k, auto& v) { c.Np = to_int(k, v); }},
      {"A_over_lambda", [](auto& c, auto& k, auto& v) { c.A_over_lambda = to_double(k, v); }},
      {"region_sweep", [](auto& c, auto& k, auto& v) { c.region_sweep = to_doubles(k, v); }},
      {"power_sweep_dbm", [](auto& c, auto& k, auto& v) { c.power_sweep_dbm = to_doubles(k, v); }},
      {"P_dbm", [](auto& c, auto& k, auto& v) { c.P_dbm = to_double(k, v); }},
      {"noise_dbm", [](auto& c, auto& k, auto& v) { c.noise_dbm = to_double(k, v); }},
      {"rho", [](auto& c, auto& k, auto& v) { c.rho = to_double(k, v); }},
      {"tau0", [](auto& c, auto& k, auto& v) { c.tau0 = to_double(k, v); }},
      {"eps1", [](auto& c, auto& k, auto& v) { c.eps1 = to_double(k, v); }},
      {"eps2", [](auto& c, auto& k, auto& v) { c.eps2 = to_double(k, v); }},
      {"eps3", [](auto& c, auto& k, auto& v) { c.eps3 = to_double(k, v); }},
      {"max_iter", [](auto& c, auto& k, auto& v) { c.max_iter = to_int(k, v); }},
      {"trials", [](auto& c, auto& k, auto& v) { c.trials = to_int(k, v); }},
      {"base_seed",
       [](auto& c, auto& k, auto& v) {
         const long long s = to_integer(k, v);
         if (s < 0) throw ConfigError("config: key '" + k + "' must be non-negative");
         c.base_seed = static_cast<std::uint64_t>(s);
       }},
      {"schemes",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.schemes.clear();
         for (const auto& name : split_list(v)) {
           const auto s = parse_scheme(name);
           if (!s) throw ConfigError("config: key '" + k + "' has unknown scheme '" + name + "'");
           if (std::find(c.schemes.begin(), c.schemes.end(), *s) == c.schemes.end()) c.schemes.push_back(*s);
         }
       }},
      {"output", [](auto& c, auto&, auto& v) { c.output = v; }},
      {"summary_output", [](auto& c, auto&, auto& v) { c.summary_output = v; }},
      {"eval_channel",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "hybrid") c.eval_channel = EvalChannel::kHybrid;
         else if (v == "exact") c.eval_channel = EvalChannel::kExact;
         else if (v == "both") c.eval_channel = EvalChannel::kBoth;
         else throw ConfigError("config: key '" + k + "' must be hybrid, exact or both");
       }},
      {"workers", [](auto& c, auto& k, auto& v) { c.workers = to_int(k, v); }},
      {"exhaustive_grid_step_lambda",
       [](auto& c, auto& k, auto& v) { c.exhaustive_grid_step_lambda = to_double(k, v); }},
      {"exhaustive_max_points",
       [](auto& c, auto& k, auto& v) { c.exhaustive_max_points = static_cast<long>(to_integer(k, v)); }},
      {"admm_max_iter", [](auto& c, auto& k, auto& v) { c.admm_max_iter = to_int(k, v); }},
      {"analog_quadratic",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "surrogate") c.analog_weight = QuadraticWeight::kSurrogate;
         else if (v == "doubled") c.analog_weight = QuadraticWeight::kDoubled;
         else throw ConfigError("config: key '" + k + "' must be surrogate or doubled");
       }},
      {"position_step",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "unit") c.step_rule = StepRule::kUnitDirection;
         else if (v == "raw") c.step_rule = StepRule::kRawGradient;
         else throw ConfigError("config: key '" + k + "' must be unit or raw");
       }},
      {"relative_stop", [](auto& c, auto& k, auto& v) { c.relative_stop = to_bool(k, v); }},
      {"monotone_guard", [](auto& c, auto& k, auto& v) { c.monotone_guard = to_bool(k, v); }},
      {"record_wall_time", [](auto& c, auto& k, auto& v) { c.record_wall_time = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::kConvergence: return "convergence";
    case Experiment::kRegionSweep: return "region_sweep";
    case Experiment::kPowerSweep: return "power_sweep";
    case Experiment::kSingle: return "single";
  }
  return "unknown";
}

std::vector<double> ExperimentConfig::aperture_points() const {
  if (experiment == Experiment::kRegionSweep) return region_sweep;
  return {A_over_lambda};
}

std::vector<double> ExperimentConfig::power_points_dbm() const {
  if (experiment == Experiment::kPowerSweep) return power_sweep_dbm;
  return {P_dbm};
}

std::string ExperimentConfig::summary_path() const {
  if (!summary_output.empty()) return summary_output;
  const auto dot = output.rfind('.');
  const auto slash = output.find_last_of("/\\");
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? output.substr(0, dot) : output) + ".summary.json";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("config: key '" + key + "' " + why);
  };
  if (!(carrier_frequency_hz > 0.0)) fail("carrier_frequency_hz", "must be positive");
  if (!perfect_square(M)) fail("M", "must be a positive perfect square");
  if (!perfect_square(N)) fail("N", "must be a positive perfect square");
  if (K < 1) fail("K", "must be >= 1");
  if (Np < 1) fail("Np", "must be >= 1");
  if (!(A_over_lambda > 0.0)) fail("A_over_lambda", "must be positive");
  if (experiment == Experiment::kRegionSweep && region_sweep.empty()) fail("region_sweep", "must not be empty");
  if (experiment == Experiment::kPowerSweep && power_sweep_dbm.empty())
    fail("power_sweep_dbm", "must not be empty");
  for (double v : region_sweep)
    if (!(v > 0.0)) fail("region_sweep", "values must be positive");
  if (!(rho > 0.0)) fail("rho", "must be positive");
  if (!(tau0 > 0.0)) fail("tau0", "must be positive");
  if (!(eps1 > 0.0)) fail("eps1", "must be positive");
  if (!(eps2 > 0.0)) fail("eps2", "must be positive");
  if (!(eps3 > 0.0)) fail("eps3", "must be positive");
  if (max_iter < 1) fail("max_iter", "must be >= 1");
  if (trials < 1) fail("trials", "must be >= 1");
  if (schemes.empty()) fail("schemes", "must list at least one scheme");
  if (workers < 0) fail("workers", "must be >= 0");
  if (!(exhaustive_grid_step_lambda > 0.0)) fail("exhaustive_grid_step_lambda", "must be positive");
  if (exhaustive_max_points < 1) fail("exhaustive_max_points", "must be >= 1");
  if (admm_max_iter < 1) fail("admm_max_iter", "must be >= 1");
  if (output.empty()) fail("output", "must not be empty");

  const double lambda = wavelength();
  for (double a : aperture_points()) {
    std::vector<RegionBox> boxes;
    try {
      boxes = tile_regions(M, N, 0.5 * lambda, a * lambda);
    } catch (const ConfigError& e) {
      fail(experiment == Experiment::kRegionSweep ? "region_sweep" : "A_over_lambda", e.what());
    }
    if (std::find(schemes.begin(), schemes.end(), Scheme::kExhaustive) != schemes.end()) {
      for (const auto& box : boxes) {
        const long count = grid_point_count(box, exhaustive_grid_step_lambda * lambda);
        if (count > exhaustive_max_points)
          fail("exhaustive_grid_step_lambda",
               "gives " + std::to_string(count) + " grid points per region at A/lambda = " + sig9(a) +
                   ", above exhaustive_max_points = " + std::to_string(exhaustive_max_points));
      }
    }
  }
}

AOConfig ExperimentConfig::ao_config(Scheme scheme, double p_dbm) const {
  AOConfig c;
  c.power_budget = dbm_to_watts(p_dbm);
  c.rho = rho;
  c.tau0 = tau0;
  c.eps1 = eps1;
  c.eps2 = eps2;
  c.eps3 = eps3;
  c.max_iterations = max_iter;
  c.scheme = scheme;
  c.exhaustive_grid_step = exhaustive_grid_step_lambda * wavelength();
  c.exhaustive_max_points = exhaustive_max_points;
  c.admm_max_iterations = admm_max_iter;
  c.analog_weight = analog_weight;
  c.step_rule = step_rule;
  c.relative_stop = relative_stop;
  c.monotone_guard = monotone_guard;
  c.record_exact = eval_channel != EvalChannel::kHybrid;
  return c;
}

ScenarioConfig ExperimentConfig::scenario_config() const {
  ScenarioConfig s;
  s.num_users = K;
  s.num_paths = Np;
  s.noise_power = dbm_to_watts(noise_dbm);
  return s;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "full") return c;
  if (name == "desk") {
    c.M = 4;
    c.N = 4;
    c.K = 4;
    c.Np = 3;
    c.trials = 50;
    c.max_iter = 60;
    c.A_over_lambda = 2.0;
    c.region_sweep = {1.0, 2.0, 4.0};
    c.power_sweep_dbm = {0.0, 10.0, 20.0};
    c.exhaustive_grid_step_lambda = 0.05;
    c.schemes = {Scheme::kProposed, Scheme::kSparseUpa, Scheme::kDenseUpa, Scheme::kExhaustive};
    return c;
  }
  throw ConfigError("config: key 'preset' must be full or desk, got '" + name + "'");
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
  it->second(config, key, value);
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  ExperimentConfig config = std::move(base);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool seen_setting = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not of the form key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("config: line " + std::to_string(line_no) + " has an empty key");
    if (key == "preset") {
      if (seen_setting) throw ConfigError("config: key 'preset' must precede every other key");
      config = preset(value);
      continue;
    }
    apply_setting(config, key, value);
    seen_setting = true;
  }
  return config;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string format_config(const ExperimentConfig& c) {
  auto scheme_list = [&] {
    std::string out;
    for (std::size_t i = 0; i < c.schemes.size(); ++i) {
      if (i) out += ",";
      out += scheme_name(c.schemes[i]);
    }
    return out;
  };
  auto eval = [&] {
    switch (c.eval_channel) {
      case EvalChannel::kHybrid: return "hybrid";
      case EvalChannel::kExact: return "exact";
      case EvalChannel::kBoth: return "both";
    }
    return "hybrid";
  };
  std::ostringstream out;
  out << "experiment = " << experiment_name(c.experiment) << "\n"
      << "carrier_frequency_hz = " << number(c.carrier_frequency_hz) << "\n"
      << "M = " << c.M << "\nN = " << c.N << "\nK = " << c.K << "\nNp = " << c.Np << "\n"
      << "A_over_lambda = " << number(c.A_over_lambda) << "\n"
      << "region_sweep = " << join(c.region_sweep) << "\n"
      << "power_sweep_dbm = " << join(c.power_sweep_dbm) << "\n"
      << "P_dbm = " << number(c.P_dbm) << "\n"
      << "noise_dbm = " << number(c.noise_dbm) << "\n"
      << "rho = " << number(c.rho) << "\n"
      << "tau0 = " << number(c.tau0) << "\n"
      << "eps1 = " << number(c.eps1) << "\neps2 = " << number(c.eps2) << "\neps3 = " << number(c.eps3) << "\n"
      << "max_iter = " << c.max_iter << "\n"
      << "trials = " << c.trials << "\n"
      << "base_seed = " << c.base_seed << "\n"
      << "schemes = " << scheme_list() << "\n"
      << "output = " << c.output << "\n"
      << "summary_output = " << c.summary_path() << "\n"
      << "eval_channel = " << eval() << "\n"
      << "workers = " << c.workers << "\n"
      << "exhaustive_grid_step_lambda = " << number(c.exhaustive_grid_step_lambda) << "\n"
      << "exhaustive_max_points = " << c.exhaustive_max_points << "\n"
      << "admm_max_iter = " << c.admm_max_iter << "\n"
      << "analog_quadratic = " << (c.analog_weight == QuadraticWeight::kDoubled ? "doubled" : "surrogate") << "\n"
      << "position_step = " << (c.step_rule == StepRule::kRawGradient ? "raw" : "unit") << "\n"
      << "relative_stop = " << (c.relative_stop ? "true" : "false") << "\n"
      << "monotone_guard = " << (c.monotone_guard ? "true" : "false") << "\n"
      << "record_wall_time = " << (c.record_wall_time ? "true" : "false") << "\n";
  return out.str();
}

namespace {

struct RunOutcome {
  std::size_t point = 0;   // index into the sweep
  std::size_t scheme = 0;  // index into config.schemes
  double sweep_value = 0.0;
  std::vector<double> trace;
  std::vector<double> exact_trace;
  double strict = 0.0;
  double wall_ms = 0.0;
  int soft_stops = 0;
};

struct TrialOutcome {
  std::uint64_t digest = 0;
  std::vector<RunOutcome> runs;
};

TrialOutcome run_trial(const ExperimentConfig& config, int trial) {
  const double lambda = config.wavelength();
  const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(trial);
  const Scenario scenario = build_scenario(config.scenario_config(), lambda, seed);

  TrialOutcome out;
  out.digest = scenario.digest();
  const auto apertures = config.aperture_points();
  const auto powers = config.power_points_dbm();
  const bool power_axis = config.experiment == Experiment::kPowerSweep;
  const std::size_t points = power_axis ? powers.size() : apertures.size();

  for (std::size_t p = 0; p < points; ++p) {
    const double a = power_axis ? config.A_over_lambda : apertures[p];
    const double p_dbm = power_axis ? powers[p] : config.P_dbm;
    for (std::size_t s = 0; s < config.schemes.size(); ++s) {
      const Scheme scheme = config.schemes[s];
      const ArrayGeometry geometry = geometry_for(scheme, config.M, config.N, lambda, a * lambda);
      const AOResult r = run_ao(scenario, geometry, config.ao_config(scheme, p_dbm), seed);
      RunOutcome run;
      run.point = p;
      run.scheme = s;
      run.sweep_value = power_axis ? p_dbm : a;
      run.trace = r.trace;
      run.exact_trace = r.exact_trace;
      run.strict = r.strict_sum_rate;
      run.wall_ms = r.wall_ms;
      run.soft_stops = r.admm_soft_stops;
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));

  unsigned workers = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(config.trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int t = next++; t < config.trials; t = next++) {
      try {
        outcomes[static_cast<std::size_t>(t)] = run_trial(config, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.experiment = experiment_name(config.experiment);
  result.trials = config.trials;
  const bool per_iteration = config.experiment == Experiment::kConvergence;
  const bool with_exact = config.eval_channel != EvalChannel::kHybrid;

  struct Keyed {
    std::size_t point, scheme;
    int trial;
    ResultRow row;
  };
  std::vector<Keyed> keyed;
  // (scheme, point) -> final values across trials
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const RunOutcome*>> groups;

  for (int t = 0; t < config.trials; ++t) {
    const auto& trial = outcomes[static_cast<std::size_t>(t)];
    result.scenario_digests.push_back(trial.digest);
    for (const auto& run : trial.runs) {
      result.admm_soft_stops += run.soft_stops;
      groups[{run.scheme, run.point}].push_back(&run);
      const std::size_t first = per_iteration ? 0 : run.trace.size() - 1;
      for (std::size_t i = first; i < run.trace.size(); ++i) {
        ResultRow row;
        row.experiment = result.experiment;
        row.scheme = std::string(scheme_name(config.schemes[run.scheme]));
        row.trial = t;
        row.seed = config.base_seed + static_cast<std::uint64_t>(t);
        row.sweep_value = run.sweep_value;
        row.iteration = static_cast<int>(i);
        row.sum_rate = run.trace[i];
        if (with_exact && i < run.exact_trace.size()) row.sum_rate_exact = run.exact_trace[i];
        if (config.record_wall_time) row.wall_ms = run.wall_ms;
        keyed.push_back({run.point, run.scheme, t, std::move(row)});
      }
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.point, a.scheme, a.trial, a.row.iteration) <
           std::tie(b.point, b.scheme, b.trial, b.row.iteration);
  });
  result.rows.reserve(keyed.size());
  for (auto& k : keyed) result.rows.push_back(std::move(k.row));

  for (const auto& [key, runs] : groups) {
    const std::string name(scheme_name(config.schemes[key.first]));
    SummaryPoint sp;
    sp.sweep_value = runs.front()->sweep_value;
    sp.count = static_cast<int>(runs.size());
    double sum = 0.0, strict = 0.0, exact = 0.0;
    for (const auto* r : runs) {
      sum += r->trace.back();
      strict += r->strict;
      if (!r->exact_trace.empty()) exact += r->exact_trace.back();
    }
    sp.mean = sum / sp.count;
    sp.mean_strict = strict / sp.count;
    if (with_exact) sp.mean_exact = exact / sp.count;
    double ss = 0.0;
    for (const auto* r : runs) ss += (r->trace.back() - sp.mean) * (r->trace.back() - sp.mean);
    sp.stderr_ = sp.count > 1 ? std::sqrt(ss / (sp.count - 1) / sp.count) : 0.0;
    result.summary[name].push_back(sp);

    if (per_iteration) {
      std::size_t longest = 0;
      for (const auto* r : runs) longest = std::max(longest, r->trace.size());
      std::vector<double> curve(longest, 0.0);
      for (const auto* r : runs)
        for (std::size_t i = 0; i < longest; ++i) curve[i] += r->trace[std::min(i, r->trace.size() - 1)];
      for (auto& v : curve) v /= static_cast<double>(runs.size());
      result.mean_trace[name] = std::move(curve);
    }
  }
  return result;
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.scheme << ',' << r.trial << ',' << r.seed << ',' << sig9(r.sweep_value) << ','
        << r.iteration << ',' << sig9(r.sum_rate) << ',';
    if (r.sum_rate_exact) out << sig9(*r.sum_rate_exact);
    out << ',';
    if (r.wall_ms) out << sig9(*r.wall_ms);
    out << '\n';
  }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  emit_csv(rows, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string summary_json(const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = result.experiment;
  j["trials"] = result.trials;
  nlohmann::ordered_json schemes = nlohmann::ordered_json::object();
  for (const auto& [name, points] : result.summary) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : points) {
      nlohmann::ordered_json e;
      e["sweep_value"] = p.sweep_value;
      e["mean"] = p.mean;
      e["stderr"] = p.stderr_;
      e["count"] = p.count;
      e["mean_unit_modulus"] = p.mean_strict;
      if (p.mean_exact) e["mean_exact"] = *p.mean_exact;
      arr.push_back(std::move(e));
    }
    schemes[name] = std::move(arr);
  }
  j["schemes"] = std::move(schemes);
  if (!result.mean_trace.empty()) {
    nlohmann::ordered_json curves = nlohmann::ordered_json::object();
    for (const auto& [name, curve] : result.mean_trace) curves[name] = curve;
    j["mean_trace"] = std::move(curves);
  }
  nlohmann::ordered_json digests = nlohmann::ordered_json::array();
  char buf[32];
  for (auto d : result.scenario_digests) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    digests.push_back(buf);
  }
  j["scenario_digests"] = std::move(digests);
  j["admm_soft_stops"] = result.admm_soft_stops;
  return j.dump(2) + "\n";
}

void write_summary(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << summary_json(result);
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace msbf
