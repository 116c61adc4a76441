// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace msbf;
using namespace msbf::test;

namespace {

AOConfig desk_config(Scheme scheme = Scheme::kProposed) {
  AOConfig c;
  c.power_budget = 0.01;
  c.max_iterations = 60;
  c.scheme = scheme;
  c.exhaustive_grid_step = kLambda / 20;
  return c;
}

ArrayGeometry desk_geometry() { return movable_geometry(4, 4, kLambda, 2 * kLambda); }

}  // namespace

TEST_CASE("initial state") {
  const auto sc = desk_scenario(1);
  const auto g = desk_geometry();
  const auto cfg = desk_config();
  const auto a = init_state(sc, g, cfg, 42);
  const auto b = init_state(sc, g, cfg, 42);
  const auto c = init_state(sc, g, cfg, 43);
  CHECK(a.w_hat == b.w_hat);
  CHECK(a.V == b.V);
  CHECK(a.w_hat != c.w_hat);
  for (const auto& w : a.w_hat) CHECK(std::abs(w) == doctest::Approx(1.0));
  CHECK(transmit_power(a.w_hat, a.V) == doctest::Approx(cfg.power_budget).epsilon(1e-9));
  for (int m = 0; m < 4; ++m) CHECK(a.positions[m] == g.regions[m].center());
}

TEST_CASE("a huge outer threshold stops after one iteration") {
  auto cfg = desk_config();
  cfg.eps1 = 1e12;
  const auto res = run_ao(desk_scenario(2), desk_geometry(), cfg, 2);
  CHECK(res.trace.size() == 2);
  CHECK(res.iterations.size() == 1);
}

TEST_CASE("trace is non-decreasing and bounded in length") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    for (auto scheme : {Scheme::kProposed, Scheme::kSparseUpa, Scheme::kDenseUpa}) {
      auto cfg = desk_config(scheme);
      cfg.max_iterations = 20;
      const auto sc = desk_scenario(seed);
      const auto g = geometry_for(scheme, 4, 4, kLambda, 2 * kLambda);
      const auto res = run_ao(sc, g, cfg, seed);
      REQUIRE(res.trace.size() >= 2);
      CHECK(res.trace.size() <= 21);
      CHECK(res.position_history.size() == res.trace.size());
      for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] >= res.trace[i - 1] - 1e-6);
      CHECK(res.state.w_hat.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
      CHECK(transmit_power(res.state.w_hat, res.state.V) <= cfg.power_budget * (1 + 1e-9));
    }
  }
}

TEST_CASE("fixed layouts never move") {
  const auto sc = desk_scenario(3);
  for (auto scheme : {Scheme::kSparseUpa, Scheme::kDenseUpa}) {
    const auto g = geometry_for(scheme, 4, 4, kLambda, 2 * kLambda);
    const auto res = run_ao(sc, g, desk_config(scheme), 3);
    for (const auto& p : res.position_history) CHECK(p == res.position_history.front());
  }
}

TEST_CASE("proposed scheme on pinned regions matches the sparse baseline") {
  const auto sc = desk_scenario(4);
  const auto movable = desk_geometry();
  const auto sparse = run_baseline_sparse(sc, movable, desk_config(), 4);
  const auto pinned = sparse_geometry(4, 4, kLambda, 2 * kLambda);
  const auto proposed = run_ao(sc, pinned, desk_config(Scheme::kProposed), 4);
  REQUIRE(proposed.trace.size() == sparse.trace.size());
  for (std::size_t i = 0; i < sparse.trace.size(); ++i)
    CHECK(std::abs(proposed.trace[i] - sparse.trace[i]) < 1e-9);
}

TEST_CASE("baseline layouts") {
  SUBCASE("sparse pitch") {
    const auto g = sparse_geometry(16, 4, kLambda, 20 * kLambda);
    std::vector<double> xs;
    for (const auto& b : g.regions) xs.push_back(b.x_lo);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             xs.end());
    REQUIRE(xs.size() == 4);
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == doctest::Approx(20 * kLambda / 8));
  }
  SUBCASE("dense layout is one contiguous half-wavelength array") {
    const auto g = dense_geometry(16, 4, kLambda, 20 * kLambda);
    std::vector<double> xs;
    for (const auto& b : g.regions)
      for (const auto& o : element_offsets(g)) xs.push_back(b.x_lo + o.x());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             xs.end());
    REQUIRE(xs.size() == 8);
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == doctest::Approx(kLambda / 2));
    CHECK(xs.back() - xs.front() == doctest::Approx(7 * kLambda / 2));
  }
  SUBCASE("sparse baseline reproduces the channel of its fixed layout") {
    const auto sc = desk_scenario(5);
    const auto g = sparse_geometry(4, 4, kLambda, 2 * kLambda);
    const auto res = run_baseline_sparse(sc, desk_geometry(), desk_config(), 5);
    const auto channels = hybrid_channel(sc, g, res.state.positions);
    const double rate = sum_rate(effective_gains(channels, res.state.w_hat, res.state.V), sc.noise_powers());
    CHECK(rate == doctest::Approx(res.trace.back()).epsilon(1e-9));
  }
}

TEST_CASE("exhaustive scheme") {
  const auto sc = desk_scenario(6);
  SUBCASE("pinned boxes reduce to the fixed-position run") {
    const auto g = sparse_geometry(4, 4, kLambda, 2 * kLambda);
    const auto ex = run_exhaustive(sc, g, desk_config(), 6);
    const auto fixed = run_ao(sc, g, desk_config(Scheme::kSparseUpa), 6);
    REQUIRE(ex.trace.size() == fixed.trace.size());
    for (std::size_t i = 0; i < ex.trace.size(); ++i) CHECK(std::abs(ex.trace[i] - fixed.trace[i]) < 1e-9);
  }
  SUBCASE("grid cap") {
    auto cfg = desk_config();
    cfg.exhaustive_grid_step = kLambda / 1000;
    cfg.exhaustive_max_points = 1000;
    CHECK_THROWS_AS(run_exhaustive(sc, desk_geometry(), cfg, 6), ConfigError);
  }
  SUBCASE("positions stay on the grid or at the start") {
    const auto g = desk_geometry();
    const auto res = run_exhaustive(sc, g, desk_config(), 6);
    const double step = kLambda / 20;
    for (int m = 0; m < 4; ++m) {
      const Vec2 t = res.state.positions[m];
      const auto& b = g.regions[m];
      const bool at_start = t == b.center();
      const auto on_axis = [&](double v, double lo, double hi) {
        const double k = std::round((v - lo) / step);
        return std::abs(v - (lo + k * step)) < 1e-12 || std::abs(v - hi) < 1e-12;
      };
      CHECK((at_start || (on_axis(t.x(), b.x_lo, b.x_hi) && on_axis(t.y(), b.y_lo, b.y_hi))));
    }
  }
}

TEST_CASE("single user approaches the matched-filter bound") {
  // M = 1 so the only degree of freedom is the analog beam.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig scfg;
    scfg.num_users = 1;
    scfg.num_paths = 1;
    const auto sc = build_scenario(scfg, kLambda, seed);
    const auto g = make_geometry(1, 4, kLambda, 2 * kLambda);
    auto cfg = desk_config(Scheme::kSparseUpa);
    cfg.power_budget = 1.0;
    cfg.eps1 = 1e-10;
    cfg.max_iterations = 200;
    const auto res = run_ao(sc, g, cfg, seed);
    const double beta2 = std::norm(sc.users[0].paths[0].gain);
    const double bound = std::log2(1.0 + cfg.power_budget * 4 * beta2 / sc.users[0].noise_power);
    CHECK(res.trace.back() <= bound + 1e-9);
    CHECK(res.trace.back() > res.trace.front());
  }
}

TEST_CASE("strict unit-modulus evaluation") {
  const auto sc = desk_scenario(7);
  const auto g = desk_geometry();
  const auto res = run_ao(sc, g, desk_config(), 7);
  const auto channels = hybrid_channel(sc, g, res.state.positions);
  const double strict = strict_unit_modulus_rate(channels, res.state, sc.noise_powers(), 0.01);
  CHECK(strict > 0.0);
  CHECK(strict == doctest::Approx(res.strict_sum_rate));
}

TEST_CASE("configuration errors") {
  AOConfig c;
  c.power_budget = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AOConfig{};
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AOConfig{};
  c.eps3 = 0.5;
  CHECK(c.admm_tolerance() == 1e-4);
  c.eps3 = 1e-6;
  CHECK(c.admm_tolerance() == 1e-6);

  CHECK(parse_scheme("proposed") == Scheme::kProposed);
  CHECK(parse_scheme("sparse_upa") == Scheme::kSparseUpa);
  CHECK_FALSE(parse_scheme("bogus").has_value());
  CHECK(scheme_name(Scheme::kExhaustive) == "exhaustive");
}
