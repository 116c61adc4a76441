// SPDX-License-Identifier: Apache-2.0

#include "msbf/ao.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "msbf/digital.hpp"
#include "msbf/position.hpp"

namespace msbf {

namespace {

constexpr std::uint64_t kInitStream = 0x9E3779B97F4A7C15ULL;

struct Evaluation {
  CMat G;
  double rate = 0.0;
};

Evaluation evaluate(const std::vector<CVec>& channels, const CVec& w_hat, const CMat& V, const RVec& noise) {
  Evaluation e;
  e.G = effective_gains(channels, w_hat, V);
  e.rate = sum_rate(e.G, noise);
  return e;
}

double exact_rate(const Scenario& scenario, const ArrayGeometry& geometry, const BeamformerState& s,
                  const RVec& noise) {
  return sum_rate(effective_gains(exact_channel(scenario, geometry, s.positions), s.w_hat, s.V), noise);
}

bool should_stop(const AOConfig& config, double previous, double current) {
  const double delta = current - previous;
  if (config.relative_stop) {
    const double rel = delta / std::max(std::abs(previous), 1e-12);
    return rel * rel < config.eps1;
  }
  return delta * delta < config.eps1;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed: return "proposed";
    case Scheme::kSparseUpa: return "sparse_upa";
    case Scheme::kDenseUpa: return "dense_upa";
    case Scheme::kExhaustive: return "exhaustive";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::kProposed, Scheme::kSparseUpa, Scheme::kDenseUpa, Scheme::kExhaustive})
    if (scheme_name(s) == name) return s;
  return std::nullopt;
}

void AOConfig::validate() const {
  if (!(power_budget > 0.0)) throw ConfigError("ao: power budget must be positive");
  if (!(rho > 0.0)) throw ConfigError("ao: rho must be positive");
  if (!(tau0 > 0.0)) throw ConfigError("ao: tau0 must be positive");
  if (!(eps1 > 0.0) || !(eps2 > 0.0) || !(eps3 > 0.0)) throw ConfigError("ao: tolerances must be positive");
  if (max_iterations < 1) throw ConfigError("ao: max_iterations must be >= 1");
  if (admm_max_iterations < 1) throw ConfigError("ao: admm_max_iterations must be >= 1");
  if (scheme == Scheme::kExhaustive && !(exhaustive_grid_step > 0.0))
    throw ConfigError("ao: exhaustive grid step must be positive");
}

BeamformerState init_state(const Scenario& scenario, const ArrayGeometry& geometry, const AOConfig& config,
                           std::uint64_t seed) {
  const int M = geometry.num_subarrays;
  const int MN = geometry.total_elements();
  BeamformerState s;
  s.positions.reserve(M);
  for (const auto& box : geometry.regions) s.positions.push_back(box.center());

  std::mt19937_64 rng(seed ^ kInitStream);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  s.w_hat.resize(MN);
  for (auto& w : s.w_hat) w = std::polar(1.0, phase(rng));

  const auto channels = hybrid_channel(scenario, geometry, s.positions);
  s.V = effective_channel(s.w_hat, channels, M);
  double power = transmit_power(s.w_hat, s.V);
  if (!(power > 0.0)) {
    s.V = CMat::Ones(M, scenario.num_users());
    power = transmit_power(s.w_hat, s.V);
  }
  s.V *= std::sqrt(config.power_budget / power);
  return s;
}

AOResult run_ao(const Scenario& scenario, const ArrayGeometry& geometry, const AOConfig& config,
                std::uint64_t seed) {
  config.validate();
  geometry.validate();
  check_clearance(scenario, geometry);
  const auto start = std::chrono::steady_clock::now();

  const int M = geometry.num_subarrays;
  const int N = geometry.antennas_per_subarray;
  const RVec noise = scenario.noise_powers();
  const double P = config.power_budget;

  AOResult result;
  BeamformerState& s = result.state;
  s = init_state(scenario, geometry, config, seed);
  std::vector<CVec> channels = hybrid_channel(scenario, geometry, s.positions);
  Evaluation current = evaluate(channels, s.w_hat, s.V, noise);
  result.trace.push_back(current.rate);
  result.position_history.push_back(s.positions);
  if (config.record_exact) result.exact_trace.push_back(exact_rate(scenario, geometry, s, noise));

  DigitalOptions digital_options;
  AdmmOptions admm_options;
  admm_options.tolerance = config.admm_tolerance();
  admm_options.max_iterations = config.admm_max_iterations;

  for (int n = 0; n < config.max_iterations; ++n) {
    IterationDiagnostics diag;
    const RVec eta = update_eta(current.G, noise);
    const CVec mu = update_mu(current.G, eta, noise);
    diag.f2_start = eval_f2(current.G, eta, mu, noise);

    // Digital beamformer.
    const auto dsub = build_digital_subproblem(s.w_hat, channels, M, eta, mu, P);
    auto digital = solve_digital(dsub, s.w_hat, digital_options);
    diag.multiplier = digital.multiplier;
    diag.power_after_digital = digital.power;
    CMat G = effective_gains(channels, s.w_hat, digital.V);
    double f2 = eval_f2(G, eta, mu, noise);
    if (config.monotone_guard && f2 < diag.f2_start) {
      diag.digital_accepted = false;
      f2 = diag.f2_start;
      G = current.G;
    } else {
      s.V = std::move(digital.V);
    }
    diag.f2_after_digital = f2;

    // Analog beamformer.
    const auto asub = build_quadratics(channels, s.V, eta, mu, P, config.rho, config.analog_weight);
    const auto admm = admm_solve(asub, s.w_hat, admm_options);
    diag.admm_iterations = admm.iterations;
    diag.admm_converged = admm.converged;
    diag.admm_initial_residual = admm.initial_residual;
    diag.admm_final_residual = admm.final_residual;
    if (!admm.converged) ++result.admm_soft_stops;
    {
      const CMat G_new = effective_gains(channels, admm.w_hat, s.V);
      const double f2_new = eval_f2(G_new, eta, mu, noise);
      if (config.monotone_guard && f2_new < f2) {
        diag.analog_accepted = false;
      } else {
        s.w_hat = admm.w_hat;
        G = G_new;
        f2 = f2_new;
      }
    }
    diag.f2_after_analog = f2;

    // Subarray positions, sequentially with the latest positions of the others.
    if (moves_subarrays(config.scheme)) {
      for (int m = 0; m < M; ++m) {
        const auto psub = build_position_subproblem(scenario, geometry, channels, s.w_hat, s.V, eta, mu, m);
        const PositionStep step =
            config.scheme == Scheme::kExhaustive
                ? exhaustive_position(psub, s.positions[m], geometry.regions[m], config.exhaustive_grid_step,
                                      config.exhaustive_max_points)
                : optimize_position(psub, s.positions[m], geometry.regions[m], config.tau0, config.eps2,
                                    config.step_rule);
        if (config.position_probe) config.position_probe(psub, s.positions[m], geometry.regions[m], step);
        if (!step.moved) continue;
        s.positions[m] = step.position;
        ++diag.subarrays_moved;
        for (int k = 0; k < scenario.num_users(); ++k)
          channels[k].segment(m * N, N) = subarray_gain(scenario, geometry, k, s.positions[m]);
      }
      G = effective_gains(channels, s.w_hat, s.V);
      f2 = eval_f2(G, eta, mu, noise);
    }
    diag.f2_after_position = f2;

    current.G = std::move(G);
    current.rate = sum_rate(current.G, noise);
    diag.sum_rate = current.rate;
    diag.max_abs_w = s.w_hat.cwiseAbs().maxCoeff();
    diag.power = transmit_power(s.w_hat, s.V);
    result.iterations.push_back(diag);
    result.trace.push_back(current.rate);
    result.position_history.push_back(s.positions);
    if (config.record_exact) result.exact_trace.push_back(exact_rate(scenario, geometry, s, noise));

    if (should_stop(config, result.trace[result.trace.size() - 2], current.rate)) break;
  }

  result.strict_sum_rate = strict_unit_modulus_rate(channels, s, noise, P);
  result.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ArrayGeometry movable_geometry(int M, int N, double wavelength, double aperture) {
  return make_geometry(M, N, wavelength, aperture);
}

ArrayGeometry sparse_geometry(int M, int N, double wavelength, double aperture) {
  ArrayGeometry g = make_geometry(M, N, wavelength, aperture);
  const double pitch = aperture / (2.0 * std::sqrt(static_cast<double>(M)));
  g.regions = pinned_regions(grid_layout(M, N, g.intra_spacing, pitch));
  return g;
}

ArrayGeometry dense_geometry(int M, int N, double wavelength, double aperture) {
  ArrayGeometry g = make_geometry(M, N, wavelength, aperture);
  g.regions = pinned_regions(grid_layout(M, N, g.intra_spacing, g.side() * g.intra_spacing));
  return g;
}

ArrayGeometry geometry_for(Scheme scheme, int M, int N, double wavelength, double aperture) {
  switch (scheme) {
    case Scheme::kSparseUpa: return sparse_geometry(M, N, wavelength, aperture);
    case Scheme::kDenseUpa: return dense_geometry(M, N, wavelength, aperture);
    default: return movable_geometry(M, N, wavelength, aperture);
  }
}

AOResult run_baseline_sparse(const Scenario& scenario, const ArrayGeometry& movable, AOConfig config,
                             std::uint64_t seed) {
  config.scheme = Scheme::kSparseUpa;
  return run_ao(scenario,
                sparse_geometry(movable.num_subarrays, movable.antennas_per_subarray, movable.wavelength,
                                movable.aperture),
                config, seed);
}

AOResult run_baseline_dense(const Scenario& scenario, const ArrayGeometry& movable, AOConfig config,
                            std::uint64_t seed) {
  config.scheme = Scheme::kDenseUpa;
  return run_ao(scenario,
                dense_geometry(movable.num_subarrays, movable.antennas_per_subarray, movable.wavelength,
                               movable.aperture),
                config, seed);
}

AOResult run_exhaustive(const Scenario& scenario, const ArrayGeometry& geometry, AOConfig config,
                        std::uint64_t seed) {
  config.scheme = Scheme::kExhaustive;
  for (const auto& box : geometry.regions) {
    const long count = grid_point_count(box, config.exhaustive_grid_step);
    if (count > config.exhaustive_max_points)
      throw ConfigError("exhaustive: region grid has " + std::to_string(count) + " points (cap " +
                        std::to_string(config.exhaustive_max_points) +
                        "); use desk-scale regions or a coarser grid step");
  }
  return run_ao(scenario, geometry, config, seed);
}

double strict_unit_modulus_rate(const std::vector<CVec>& channels, const BeamformerState& state,
                                const RVec& noise, double power_budget) {
  const CVec w = to_unit_modulus(state.w_hat);
  CMat V = state.V;
  const double power = transmit_power(w, V);
  if (power > power_budget) V *= std::sqrt(power_budget / power);
  return sum_rate(effective_gains(channels, w, V), noise);
}

}  // namespace msbf
