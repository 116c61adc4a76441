// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace msbf;
using namespace msbf::test;

namespace {

struct State {
  Scenario scenario;
  ArrayGeometry geometry;
  SubarrayPositions positions;
  CVec w_hat;
  CMat V;
  RVec eta;
  CVec mu;
  RVec noise;
};

State random_state(std::uint64_t seed, int M = 4, int N = 4, int K = 3, int Np = 3) {
  std::mt19937_64 rng(seed);
  State s;
  s.scenario = desk_scenario(seed, K, Np);
  s.geometry = make_geometry(M, N, kLambda, 4 * kLambda);
  for (const auto& b : s.geometry.regions) s.positions.push_back(random_point(rng, b));
  s.w_hat = random_phases(rng, M * N);
  s.V = random_cmat(rng, M, K, 1e3);
  s.noise = RVec::Constant(K, 1e-11);
  const CMat G = effective_gains(hybrid_channel(s.scenario, s.geometry, s.positions), s.w_hat, s.V);
  s.eta = update_eta(G, s.noise);
  s.mu = update_mu(G, s.eta, s.noise);
  return s;
}

PositionSubproblem subproblem(const State& s, int m) {
  const auto channels = hybrid_channel(s.scenario, s.geometry, s.positions);
  return build_position_subproblem(s.scenario, s.geometry, channels, s.w_hat, s.V, s.eta, s.mu, m);
}

double f2_at(const State& s, const SubarrayPositions& pos) {
  const auto channels = hybrid_channel(s.scenario, s.geometry, pos);
  return eval_f2(effective_gains(channels, s.w_hat, s.V), s.eta, s.mu, s.noise);
}

}  // namespace

TEST_CASE("subarray gain") {
  const State s = random_state(1);
  const auto channels = hybrid_channel(s.scenario, s.geometry, s.positions);
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 4; ++m)
      CHECK((subarray_gain(s.scenario, s.geometry, k, s.positions[m]) - channels[k].segment(4 * m, 4)).norm() <
            1e-12 * channels[k].norm());

  Scenario los;
  los.users.push_back({{{Vec3(1, 2, 8), cplx(1.0), direction_cosines(Vec3(1, 2, 8))}}, 1e-11});
  const CVec c = subarray_gain(los, s.geometry, 0, {0.001, 0.002});
  for (const auto& x : c) CHECK(std::abs(x) == doctest::Approx(1.0));

  los.users[0].paths[0].gain = 0.0;
  CHECK(subarray_gain(los, s.geometry, 0, {0.0, 0.0}).norm() == 0.0);
  CHECK(gain_jacobian(los, s.geometry, 0, {0.0, 0.0}).norm() == 0.0);
}

TEST_CASE("gain jacobian") {
  const State s = random_state(2);
  const double h = 1e-6 * kLambda;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec2 t = random_point(rng, s.geometry.regions[trial % 4]);
    const CMat J = gain_jacobian(s.scenario, s.geometry, trial % 3, t);
    for (int axis = 0; axis < 2; ++axis) {
      Vec2 e = Vec2::Zero();
      e[axis] = h;
      const CVec fd = (subarray_gain(s.scenario, s.geometry, trial % 3, t + e) -
                       subarray_gain(s.scenario, s.geometry, trial % 3, t - e)) / (2 * h);
      CHECK((J.row(axis).transpose() - fd).norm() <= 1e-4 * fd.norm());
    }
  }

  // Broadside source above the reference point: the path length is
  // stationary, so the LoS derivative vanishes.
  Scenario above;
  const Vec3 r(0.0, 0.0, 10.0);
  above.users.push_back({{{r, cplx(1.0), direction_cosines(r)}}, 1e-11});
  CHECK(gain_jacobian(above, s.geometry, 0, {0.0, 0.0}).norm() < 1e-12);

  // Gains scale linearly.
  Scenario doubled = s.scenario;
  for (auto& p : doubled.users[0].paths) p.gain *= 2.0;
  const Vec2 t = s.positions[0];
  CHECK((gain_jacobian(doubled, s.geometry, 0, t) - 2.0 * gain_jacobian(s.scenario, s.geometry, 0, t)).norm() <
        1e-12 * gain_jacobian(doubled, s.geometry, 0, t).norm());
}

TEST_CASE("f6 tracks the surrogate along one subarray") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const State s = random_state(seed);
    std::mt19937_64 rng(seed);
    for (int m = 0; m < 4; ++m) {
      const auto sub = subproblem(s, m);
      SubarrayPositions moved = s.positions;
      moved[m] = random_point(rng, s.geometry.regions[m]);
      const double d2 = f2_at(s, moved) - f2_at(s, s.positions);
      const double d6 = eval_f6(sub, moved[m]) - eval_f6(sub, s.positions[m]);
      CHECK(std::abs(d2 - d6) <= 1e-9 * std::max(1.0, std::abs(f2_at(s, s.positions))));
    }
  }
}

TEST_CASE("cross blocks") {
  std::mt19937_64 rng(3);
  std::vector<CVec> omega{random_cvec(rng, 8), random_cvec(rng, 8)};
  const CMat X01 = cross_block(omega, 4, 0, 1);
  CMat dense = CMat::Zero(8, 8);
  for (const auto& o : omega) dense += o * o.adjoint();
  CHECK((X01 - dense.block(0, 4, 4, 4)).norm() < 1e-13);
  CHECK((cross_block(omega, 4, 1, 0) - X01.adjoint()).norm() < 1e-13);
}

TEST_CASE("f6 gradient") {
  const State s = random_state(4);
  const auto sub = subproblem(s, 1);
  const double h = 1e-6 * kLambda;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec2 t = random_point(rng, s.geometry.regions[1]);
    const Vec2 g = grad_f6(sub, t);
    const Vec2 fd((eval_f6(sub, t + Vec2(h, 0)) - eval_f6(sub, t - Vec2(h, 0))) / (2 * h),
                  (eval_f6(sub, t + Vec2(0, h)) - eval_f6(sub, t - Vec2(0, h))) / (2 * h));
    CHECK((g - fd).norm() <= 1e-4 * std::max(fd.norm(), 1e-12));
  }

  PositionSubproblem flat = sub;
  flat.mu_abs2.setZero();
  flat.f.setZero();
  CHECK(eval_f6(flat, s.positions[1]) == 0.0);
  CHECK(grad_f6(flat, s.positions[1]).norm() == 0.0);
}

TEST_CASE("region projection") {
  const RegionBox box{0.0, 1.0, -1.0, 2.0};
  CHECK(project_region({2.0, 1.0}, box) == Vec2(1.0, 1.0));
  CHECK(project_region({-3.0, -2.0}, box) == Vec2(0.0, -1.0));
  CHECK(project_region({0.5, 0.5}, box) == Vec2(0.5, 0.5));
  CHECK(project_region({box.x_hi + 1, box.y_lo - 1}, box) == Vec2(box.x_hi, box.y_lo));
}

TEST_CASE("gradient step") {
  SUBCASE("never lowers f6 and stays in the box") {
    for (std::uint64_t seed = 20; seed < 40; ++seed) {
      const State s = random_state(seed);
      for (int m = 0; m < 4; ++m) {
        const auto sub = subproblem(s, m);
        const auto& box = s.geometry.regions[m];
        for (auto rule : {StepRule::kUnitDirection, StepRule::kRawGradient}) {
          const auto step = optimize_position(sub, s.positions[m], box, 0.1, 1e-3 * kLambda, rule);
          CHECK(step.value_after >= step.value_before);
          CHECK(step.position == project_region(step.position, box));
          CHECK(step.value_after == doctest::Approx(eval_f6(sub, step.position)));
          if (!step.moved) CHECK(step.position == s.positions[m]);
        }
      }
    }
  }
  SUBCASE("flat objective does not move") {
    const State s = random_state(5);
    PositionSubproblem flat = subproblem(s, 0);
    flat.mu_abs2.setZero();
    flat.f.setZero();
    const auto step = optimize_position(flat, s.positions[0], s.geometry.regions[0], 0.1, 1e-5);
    CHECK_FALSE(step.moved);
    CHECK(step.position == s.positions[0]);
  }
  SUBCASE("degenerate box does not move") {
    const State s = random_state(6);
    const auto sub = subproblem(s, 0);
    const RegionBox pin{s.positions[0].x(), s.positions[0].x(), s.positions[0].y(), s.positions[0].y()};
    CHECK_FALSE(optimize_position(sub, s.positions[0], pin, 0.1, 1e-5).moved);
  }
  SUBCASE("repeated steps reach the interior optimum on a line") {
    // One element, one user, one path: f6 is a sinusoid in the path length.
    State s;
    const Vec3 r(4.0, 0.0, 3.0);
    s.scenario.users.push_back({{{r, cplx(1e-3, 0), direction_cosines(r)}}, 1e-11});
    s.geometry = make_geometry(1, 1, kLambda, 4 * kLambda);
    s.positions = {Vec2::Zero()};
    s.w_hat = CVec::Ones(1);
    s.V = CMat::Constant(1, 1, cplx(0.0, 1.0) * 1e4);
    s.noise = RVec::Constant(1, 1e-11);
    const CMat G = effective_gains(hybrid_channel(s.scenario, s.geometry, s.positions), s.w_hat, s.V);
    s.eta = update_eta(G, s.noise);
    s.mu = update_mu(G, s.eta, s.noise);
    // Perturb the phase reference so the optimum is not at the origin.
    s.V *= std::polar(1.0, 1.0);
    const auto sub = subproblem(s, 0);

    double best_x = 0.0;
    double best = -1e300;
    for (double x = -kLambda; x <= kLambda; x += 1e-4 * kLambda) {
      const double v = eval_f6(sub, {x, 0.0});
      if (v > best) best = v, best_x = x;
    }
    const RegionBox line{best_x - 0.3 * kLambda, best_x + 0.3 * kLambda, 0.0, 0.0};
    Vec2 t(line.x_lo, 0.0);
    for (int it = 0; it < 2000; ++it) {
      const auto step = optimize_position(sub, t, line, kLambda, 1e-6 * kLambda);
      if (!step.moved) break;
      t = step.position;
    }
    CHECK(std::abs(t.x() - best_x) < 1e-2 * kLambda);
  }
}

TEST_CASE("grid search") {
  const State s = random_state(7);
  const auto sub = subproblem(s, 2);
  const RegionBox& full = s.geometry.regions[2];
  const RegionBox box{full.x_lo, full.x_lo + kLambda / 2, full.y_lo, full.y_lo + kLambda / 2};

  CHECK(grid_point_count(box, kLambda / 20) == 121);
  CHECK(grid_point_count({0, 0, 0, 0}, kLambda / 20) == 1);
  CHECK_THROWS_AS(grid_point_count(box, 0.0), ConfigError);
  CHECK_THROWS_AS(exhaustive_position(sub, s.positions[2], box, kLambda / 20, 100), ConfigError);

  const Vec2 start = project_region(s.positions[2], box);
  const auto step = exhaustive_position(sub, start, box, kLambda / 20, 1000);
  CHECK(step.trials == 121);
  CHECK(step.value_after >= step.value_before);
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j)
      CHECK(step.value_after >= eval_f6(sub, {box.x_lo + i * kLambda / 20, box.y_lo + j * kLambda / 20}) - 1e-12);

  const RegionBox pin{start.x(), start.x(), start.y(), start.y()};
  const auto stay = exhaustive_position(sub, start, pin, kLambda / 20, 10);
  CHECK_FALSE(stay.moved);
  CHECK(stay.position == start);
}
