// SPDX-License-Identifier: Apache-2.0

#include "msbf/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "msbf/ao.hpp"
#include "msbf/digital.hpp"
#include "msbf/objective.hpp"
#include "msbf/position.hpp"

namespace msbf {

namespace {

constexpr double kFc = 30e9;

double wavelength() { return kSpeedOfLight / kFc; }

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

CVec random_cvec(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5) * scale);
  CVec v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

CVec random_disk(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVec v(n);
  for (auto& x : v) x = std::polar(std::sqrt(u(rng)), 2.0 * kPi * u(rng));
  return v;
}

Vec2 random_point(std::mt19937_64& rng, const RegionBox& box) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {box.x_lo + (box.x_hi - box.x_lo) * u(rng), box.y_lo + (box.y_hi - box.y_lo) * u(rng)};
}

struct Instance {
  Scenario scenario;
  ArrayGeometry geometry;
  RVec noise;
};

Instance desk_instance(int M, int N, int K, int Np, double a_over_lambda, std::uint64_t seed) {
  ScenarioConfig sc;
  sc.num_users = K;
  sc.num_paths = Np;
  Instance in;
  in.scenario = build_scenario(sc, wavelength(), seed);
  in.geometry = movable_geometry(M, N, wavelength(), a_over_lambda * wavelength());
  in.noise = in.scenario.noise_powers();
  return in;
}

// Random position subproblem built from a perturbed initial state.
PositionSubproblem random_position_subproblem(const Instance& in, std::mt19937_64& rng, std::uint64_t seed,
                                              int& m, SubarrayPositions& positions) {
  AOConfig cfg;
  BeamformerState s = init_state(in.scenario, in.geometry, cfg, seed);
  s.w_hat = random_disk(rng, s.w_hat.size());
  s.V += 0.5 * s.V.norm() / std::sqrt(static_cast<double>(s.V.size())) *
         CMat(random_cvec(rng, s.V.size()).reshaped(s.V.rows(), s.V.cols()));
  positions.clear();
  for (const auto& box : in.geometry.regions) positions.push_back(random_point(rng, box));
  const auto channels = hybrid_channel(in.scenario, in.geometry, positions);
  const CMat G = effective_gains(channels, s.w_hat, s.V);
  const RVec eta = update_eta(G, in.noise);
  const CVec mu = update_mu(G, eta, in.noise);
  m = std::uniform_int_distribution<int>(0, in.geometry.num_subarrays - 1)(rng);
  return build_position_subproblem(in.scenario, in.geometry, channels, s.w_hat, s.V, eta, mu, m);
}

// Analog subproblem as the AO loop sees it after the first digital update.
struct AnalogCase {
  AnalogSubproblem sub;
  CVec w_init;
};

AnalogCase analog_case(int M, int N, int K, std::uint64_t seed, double rho) {
  const Instance in = desk_instance(M, N, K, 3, 2.0, seed);
  AOConfig cfg;
  cfg.rho = rho;
  BeamformerState s = init_state(in.scenario, in.geometry, cfg, seed);
  const auto channels = hybrid_channel(in.scenario, in.geometry, s.positions);
  const CMat G = effective_gains(channels, s.w_hat, s.V);
  const RVec eta = update_eta(G, in.noise);
  const CVec mu = update_mu(G, eta, in.noise);
  const auto dsub = build_digital_subproblem(s.w_hat, channels, M, eta, mu, cfg.power_budget);
  const CMat V = solve_digital(dsub, s.w_hat).V;
  return {build_quadratics(channels, V, eta, mu, cfg.power_budget, rho, cfg.analog_weight), s.w_hat};
}

}  // namespace

CVec project_peak_and_power(const CVec& y, const RVec& d, double power_budget) {
  auto shrink = [&](double nu) {
    CVec w(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const cplx v = y[i] / (1.0 + nu * d[i]);
      const double a = std::abs(v);
      w[i] = a > 1.0 ? v / a : v;
    }
    return w;
  };
  auto power = [&](const CVec& w) { return (d.array() * w.cwiseAbs2().array()).sum(); };
  CVec w = shrink(0.0);
  if (power(w) <= power_budget) return w;
  double lo = 0.0, hi = 1.0;
  while (power(shrink(hi)) > power_budget) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (power(shrink(mid)) > power_budget ? lo : hi) = mid;
  }
  return shrink(hi);
}

CVec maximize_f4_reference(const AnalogSubproblem& sub, const std::vector<CVec>& starts, int iterations) {
  const double q = quadratic_weight(sub.weight);
  const double L = q * std::max(Eigen::SelfAdjointEigenSolver<CMat>(sub.T).eigenvalues().maxCoeff(), 1e-300);
  const double step = 1.0 / L;
  CVec best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    CVec w = project_peak_and_power(start, sub.v_hat_energy, sub.power_budget);
    CVec y = w;
    double t = 1.0;
    double value = eval_f4(sub, w);
    for (int it = 0; it < iterations; ++it) {
      const CVec next = project_peak_and_power(y + step * (sub.r - q * sub.T * y), sub.v_hat_energy, sub.power_budget);
      const double next_value = eval_f4(sub, next);
      if (next_value < value) {  // restart the momentum
        t = 1.0;
        y = w;
        continue;
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / t_next) * (next - w);
      w = next;
      t = t_next;
      value = next_value;
    }
    if (value > best_value) {
      best_value = value;
      best = w;
    }
  }
  return best;
}

OracleReport check_fp_tightness(int states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_real_distribution<double> logu(-3.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < states; ++s) {
    const int M = dim(rng), N = dim(rng), K = dim(rng);
    std::vector<CVec> channels;
    for (int k = 0; k < K; ++k) channels.push_back(random_cvec(rng, M * N));
    const CVec w = random_disk(rng, M * N);
    const CMat V = random_cvec(rng, M * K).reshaped(M, K);
    RVec noise(K);
    for (auto& x : noise) x = std::pow(10.0, logu(rng));
    const CMat G = effective_gains(channels, w, V);
    const RVec eta = update_eta(G, noise);
    const CVec mu = update_mu(G, eta, noise);
    const double rate = sum_rate(G, noise);
    const double f1 = eval_f1(G, eta, mu, noise);
    worst = std::max(worst, std::abs(f1 - rate) / std::max(std::abs(rate), 1e-300));
  }
  return {"fp_tightness", worst, 1e-9, worst <= 1e-9, fmt("max relative |f1 - R| over %.0f states", states)};
}

OracleReport check_position_gradient(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double h = 1e-6 * wavelength();
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const Instance in = desk_instance(4, 4, 4, 3, 2.0, seed + 1000 + static_cast<std::uint64_t>(i));
    int m = 0;
    SubarrayPositions positions;
    const auto sub = random_position_subproblem(in, rng, seed + static_cast<std::uint64_t>(i), m, positions);
    const Vec2 t = positions[m];
    const Vec2 g = grad_f6(sub, t);
    Vec2 fd;
    for (int p = 0; p < 2; ++p) {
      Vec2 e = Vec2::Zero();
      e[p] = h;
      fd[p] = (eval_f6(sub, t + e) - eval_f6(sub, t - e)) / (2.0 * h);
    }
    worst = std::max(worst, (fd - g).norm() / std::max(g.norm(), 1e-300));
  }
  return {"grad_f6_finite_difference", worst, 1e-4, worst <= 1e-4,
          fmt("max ||fd - grad|| / ||grad|| over %.0f instances", instances)};
}

OracleReport check_gain_jacobian(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double h = 1e-6 * wavelength();
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const Instance in = desk_instance(4, 4, 4, 3, 2.0, seed + 2000 + static_cast<std::uint64_t>(i));
    const int user = std::uniform_int_distribution<int>(0, 3)(rng);
    const int m = std::uniform_int_distribution<int>(0, 3)(rng);
    const Vec2 t = random_point(rng, in.geometry.regions[m]);
    const CMat J = gain_jacobian(in.scenario, in.geometry, user, t);
    for (int p = 0; p < 2; ++p) {
      Vec2 e = Vec2::Zero();
      e[p] = h;
      const CVec fd = (subarray_gain(in.scenario, in.geometry, user, t + e) -
                       subarray_gain(in.scenario, in.geometry, user, t - e)) /
                      (2.0 * h);
      for (Eigen::Index n = 0; n < fd.size(); ++n)
        worst = std::max(worst, std::abs(fd[n] - J(p, n)) / std::max(std::abs(J(p, n)), 1e-300));
    }
  }
  return {"gain_jacobian_finite_difference", worst, 1e-4, worst <= 1e-4,
          fmt("max entrywise relative error over %.0f instances", instances)};
}

OracleReport check_admm_quality(int seeds, std::uint64_t seed, int max_iterations) {
  double worst = std::numeric_limits<double>::infinity();
  double worst_scale = 0.0;
  int most_iterations = 0;
  const int shapes[][3] = {{1, 4, 2}, {4, 1, 2}, {1, 4, 3}, {4, 1, 3}, {1, 4, 1}};
  for (int s = 0; s < seeds; ++s) {
    const auto& shape = shapes[s % 5];
    const auto c = analog_case(shape[0], shape[1], shape[2], seed + static_cast<std::uint64_t>(s), 30.0);
    AdmmOptions options;
    options.tolerance = 1e-4;
    options.max_iterations = max_iterations;
    const auto report = admm_solve(c.sub, c.w_init, options);
    const CVec& w_admm = report.w_hat;
    most_iterations = std::max(most_iterations, report.iterations);
    std::mt19937_64 rng(seed + 77 + static_cast<std::uint64_t>(s));
    std::vector<CVec> starts{c.w_init, CVec::Zero(c.w_init.size()), c.sub.r};
    for (int j = 0; j < 4; ++j) starts.push_back(random_disk(rng, c.w_init.size()));
    const CVec w_ref = maximize_f4_reference(c.sub, starts);
    const double margin = eval_f4(c.sub, w_admm) - eval_f4(c.sub, w_ref);
    if (margin < worst) {
      worst = margin;
      worst_scale = std::abs(eval_f4(c.sub, w_ref));
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "min f4(admm) - f4(reference); |f4| at the worst case %.4g; ADMM cap %d, most iterations used %d",
                worst_scale, max_iterations, most_iterations);
  return {max_iterations >= 200000 ? "admm_vs_projected_gradient" : "admm_vs_projected_gradient_capped", worst,
          -1e-3, worst >= -1e-3, buf};
}

OracleReport check_admm_stationarity(int seeds, std::uint64_t seed) {
  double worst = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto c = s % 2 ? analog_case(4, 1, 2, seed + static_cast<std::uint64_t>(s), 30.0)
                         : analog_case(1, 4, 2, seed + static_cast<std::uint64_t>(s), 30.0);
    std::mt19937_64 rng(seed + 31 + static_cast<std::uint64_t>(s));
    AdmmState st = warm_start(c.sub, c.w_init);
    st.kappa = random_disk(rng, st.kappa.size());
    st.x = random_cvec(rng, st.x.size(), 0.1);
    st.zeta = random_cvec(rng, st.zeta.size(), 0.1).reshaped(st.zeta.rows(), st.zeta.cols());
    st.z = random_cvec(rng, st.z.size(), 0.1).reshaped(st.z.rows(), st.z.cols());
    auto fd_grad = [&](const CVec& w) {
      RVec g(2 * w.size());
      for (Eigen::Index i = 0; i < w.size(); ++i)
        for (int part = 0; part < 2; ++part) {
          const double h = 1e-6 * std::max(1.0, std::abs(w[i]));
          CVec wp = w, wm = w;
          const cplx e = part == 0 ? cplx(h, 0.0) : cplx(0.0, h);
          wp[i] += e;
          wm[i] -= e;
          g[2 * i + part] =
              (augmented_lagrangian(c.sub, st, wp) - augmented_lagrangian(c.sub, st, wm)) / (2.0 * h);
        }
      return g;
    };
    const CVec w_star = admm_w_update(c.sub, st);
    const double scale = fd_grad(random_disk(rng, w_star.size())).norm();
    worst = std::max(worst, fd_grad(w_star).norm() / std::max(scale, 1e-300));
  }
  return {"admm_w_update_stationarity", worst, 1e-6, worst < 1e-6,
          fmt("max ||grad L(w*)|| / ||grad L(w_random)|| over %.0f seeds", seeds)};
}

OracleReport check_position_dominance(int runs, std::uint64_t seed) {
  const double lambda = wavelength();
  double worst = std::numeric_limits<double>::infinity();
  long steps = 0, violations = 0;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(r);
    const Instance in = desk_instance(4, 4, 4, 3, 2.0, s);
    AOConfig cfg;
    cfg.max_iterations = 60;
    cfg.scheme = Scheme::kExhaustive;
    cfg.exhaustive_grid_step = lambda / 20.0;
    cfg.position_probe = [&](const PositionSubproblem& sub, const Vec2& t, const RegionBox& box,
                             const PositionStep& grid) {
      const auto grad = optimize_position(sub, t, box, cfg.tau0, cfg.eps2, cfg.step_rule);
      const double d = grid.value_after - grad.value_after;
      worst = std::min(worst, d);
      if (d < -1e-9) ++violations;
      ++steps;
    };
    run_ao(in.scenario, in.geometry, cfg, s);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "min f6(grid) - f6(gradient); gradient step wins in %ld of %ld exhaustive steps",
                violations, steps);
  return {"exhaustive_position_dominance", worst, -1e-9, worst >= -1e-9, buf};
}

OracleReport check_offgrid_dominance(int runs, std::uint64_t seed) {
  const double lambda = wavelength();
  double worst = std::numeric_limits<double>::infinity();
  long steps = 0, violations = 0;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(r);
    const Instance in = desk_instance(4, 4, 4, 3, 2.0, s);
    AOConfig cfg;
    cfg.max_iterations = 60;
    cfg.position_probe = [&](const PositionSubproblem& sub, const Vec2& t, const RegionBox& box,
                             const PositionStep& grad) {
      const auto grid = exhaustive_position(sub, t, box, lambda / 20.0, 250000);
      const double d = grid.value_after - grad.value_after;
      worst = std::min(worst, d);
      if (d < -1e-9) ++violations;
      ++steps;
    };
    run_ao(in.scenario, in.geometry, cfg, s);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "grid beaten by an off-grid gradient step in %ld of %ld proposed-run steps",
                violations, steps);
  return {"offgrid_position_dominance", worst, -1e-9, worst >= -1e-9, buf};
}

OracleReport check_matched_filter(int seeds, std::uint64_t seed) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    const Instance in = desk_instance(1, 4, 1, 1, 2.0, s);
    AOConfig cfg;
    cfg.power_budget = dbm_to_watts(30.0);
    cfg.eps1 = 1e-10;
    const AOResult res = run_ao(in.scenario, in.geometry, cfg, s);
    const double beta2 = std::norm(in.scenario.users[0].paths[0].gain);
    const double bound = cfg.power_budget * in.geometry.total_elements() * beta2 / in.noise[0];
    const double snr = std::exp2(res.trace.back()) - 1.0;
    worst = std::min(worst, snr / bound);
  }
  return {"single_user_matched_filter", worst, 0.99, worst >= 0.99 && worst <= 1.0 + 1e-9,
          fmt("min SNR / (P MN |beta|^2 / sigma^2) over %.0f seeds", seeds)};
}

OracleReport check_hybrid_exact_n1(std::uint64_t seed) {
  const Instance in = desk_instance(16, 1, 4, 6, 4.0, seed);
  std::mt19937_64 rng(seed);
  SubarrayPositions positions;
  for (const auto& box : in.geometry.regions) positions.push_back(random_point(rng, box));
  const auto hybrid = hybrid_channel(in.scenario, in.geometry, positions);
  const auto exact = exact_channel(in.scenario, in.geometry, positions);
  double worst = 0.0;
  for (std::size_t k = 0; k < hybrid.size(); ++k) worst = std::max(worst, (hybrid[k] - exact[k]).cwiseAbs().maxCoeff());
  return {"hybrid_equals_exact_at_n1", worst, 0.0, worst == 0.0, "max |h_hybrid - h_exact| with N = 1"};
}

OracleReport check_phase_error_ladder() {
  const double lambda = wavelength();
  const ArrayGeometry g = movable_geometry(4, 16, lambda, 20.0 * lambda);
  SubarrayPositions positions;
  for (const auto& box : g.regions) positions.push_back(box.center());
  const Vec3 dir = Vec3(0.3, -0.2, 1.0).normalized();
  std::vector<double> errors;
  for (double d : {5.0, 15.0, 45.0}) {
    Scenario sc;
    User u;
    u.paths.push_back({d * dir, cplx(1.0, 0.0), direction_cosines(d * dir)});
    sc.users.push_back(u);
    const CVec h = hybrid_channel(sc, g, positions)[0];
    const CVec e = exact_channel(sc, g, positions)[0];
    double worst = 0.0;
    for (Eigen::Index i = 0; i < h.size(); ++i) worst = std::max(worst, std::abs(std::arg(e[i] / h[i])));
    errors.push_back(worst);
  }
  const bool decreasing = errors[0] > errors[1] && errors[1] > errors[2];
  char buf[160];
  std::snprintf(buf, sizeof buf, "max phase error (rad) at 5/15/45 m: %.4g %.4g %.4g", errors[0], errors[1],
                errors[2]);
  return {"phase_error_decreases_with_distance", errors[2], errors[1], decreasing, buf};
}

std::vector<OracleReport> run_all_oracles(std::uint64_t seed) {
  OracleReport capped = check_admm_quality(50, seed, 300);
  capped.gating = false;
  OracleReport offgrid = check_offgrid_dominance(10, seed);
  offgrid.gating = false;
  OracleReport matched = check_matched_filter(5, seed);
  matched.gating = false;
  return {check_fp_tightness(100, seed),
          check_position_gradient(100, seed),
          check_gain_jacobian(100, seed),
          check_admm_quality(50, seed),
          capped,
          check_admm_stationarity(50, seed),
          check_position_dominance(10, seed),
          offgrid,
          matched,
          check_hybrid_exact_n1(seed),
          check_phase_error_ladder()};
}

}  // namespace msbf
