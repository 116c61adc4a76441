// SPDX-License-Identifier: Apache-2.0
//
// Small helpers shared by the unit tests.

#pragma once

#include <random>
#include <vector>

#include "msbf/ao.hpp"
#include "msbf/digital.hpp"

namespace msbf::test {

inline constexpr double kLambda = kSpeedOfLight / 30e9;

inline CVec random_cvec(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale * std::sqrt(0.5));
  CVec v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

inline CMat random_cmat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  return random_cvec(rng, r * c, scale).reshaped(r, c);
}

inline CVec random_phases(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  CVec v(n);
  for (auto& x : v) x = std::polar(1.0, u(rng));
  return v;
}

inline Vec2 random_point(std::mt19937_64& rng, const RegionBox& box) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {box.x_lo + (box.x_hi - box.x_lo) * u(rng), box.y_lo + (box.y_hi - box.y_lo) * u(rng)};
}

inline Scenario desk_scenario(std::uint64_t seed, int K = 4, int Np = 3) {
  ScenarioConfig sc;
  sc.num_users = K;
  sc.num_paths = Np;
  return build_scenario(sc, kLambda, seed);
}

// Dense Phi-based W for cross-checks.
inline CMat dense_W(const CVec& w_hat, int M) { return assemble_W(w_hat, M); }

}  // namespace msbf::test
