// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace msbf;
using namespace msbf::test;

namespace {

struct Setup {
  std::vector<CVec> channels;
  CVec w_hat;
  RVec eta;
  CVec mu;
  RVec noise;
};

Setup random_setup(std::mt19937_64& rng, int M, int N, int K) {
  Setup s;
  for (int k = 0; k < K; ++k) s.channels.push_back(random_cvec(rng, M * N));
  s.w_hat = random_phases(rng, M * N);
  s.noise = RVec::Constant(K, 0.1);
  const CMat G = effective_gains(s.channels, s.w_hat, random_cmat(rng, M, K));
  s.eta = update_eta(G, s.noise);
  s.mu = update_mu(G, s.eta, s.noise);
  return s;
}

}  // namespace

TEST_CASE("effective channel") {
  std::mt19937_64 rng(1);
  const auto s = random_setup(rng, 4, 4, 3);
  const CMat E = effective_channel(s.w_hat, s.channels, 4);
  const CMat W = assemble_W(s.w_hat, 4);
  for (int k = 0; k < 3; ++k) CHECK((E.col(k) - W.adjoint() * s.channels[k]).norm() < 1e-12);

  // Unit weights and an all-ones channel sum the block.
  const CMat ones = effective_channel(CVec::Ones(8), {CVec::Ones(8)}, 2);
  CHECK(std::abs(ones(0, 0) - 4.0) < 1e-15);
  CHECK(std::abs(ones(1, 0) - 4.0) < 1e-15);
  CHECK_THROWS_AS(effective_channel(CVec::Ones(7), {CVec::Ones(7)}, 2), ConfigError);
}

TEST_CASE("solve_v") {
  SUBCASE("identity system") {
    DigitalSubproblem sub;
    sub.B_sum = CMat::Identity(2, 2);
    sub.gram = CMat::Identity(2, 2);
    sub.targets = CMat::Zero(2, 1);
    sub.targets(0, 0) = cplx(1, 2);
    sub.targets(1, 0) = cplx(-3, 0.5);
    const CMat V = solve_v(sub, 1.0);
    CHECK((V - 0.5 * sub.targets).norm() < 1e-14);
  }
  SUBCASE("residual of the normal equations") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = random_setup(rng, 4, 4, 4);
      const auto sub = build_digital_subproblem(s.w_hat, s.channels, 4, s.eta, s.mu, 1.0);
      const double lambda = 0.37;
      const CMat V = solve_v(sub, lambda);
      const CMat A = sub.B_sum + lambda * sub.gram;
      CHECK((A * V - sub.targets).norm() < 1e-10 * sub.targets.norm());
    }
  }
  SUBCASE("singular system uses the minimum-norm solution") {
    DigitalSubproblem sub;
    CVec h(2);
    h << 1.0, 0.0;
    sub.B_sum = h * h.adjoint();
    sub.gram = CMat::Identity(2, 2);
    sub.targets = 2.0 * h;
    const CMat V = solve_v(sub, 0.0);
    CHECK(std::abs(V(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(V(1, 0)) < 1e-14);
  }
}

TEST_CASE("transmit power") {
  std::mt19937_64 rng(3);
  const CVec w = random_cvec(rng, 8);
  const CMat V = random_cmat(rng, 2, 3);
  const CMat W = assemble_W(w, 2);
  CHECK(transmit_power(w, V) == doctest::Approx((W * V).squaredNorm()).epsilon(1e-12));
  CHECK(transmit_power(random_phases(rng, 8), CMat::Zero(2, 3)) == 0.0);
}

TEST_CASE("digital step meets the power budget") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_setup(rng, 4, 4, 4);
    for (double P : {1e-3, 1e-1, 10.0, 1e3}) {
      const auto sub = build_digital_subproblem(s.w_hat, s.channels, 4, s.eta, s.mu, P);
      const auto sol = solve_digital(sub, s.w_hat);
      CHECK(sol.power <= P * (1 + 1e-12));
      CHECK(transmit_power(s.w_hat, sol.V) == doctest::Approx(sol.power));
      if (sol.multiplier > 0.0) {
        CHECK(P - sol.power <= 1e-6 * P);
      } else {
        CHECK(sol.power <= P);
      }
    }
  }
}

TEST_CASE("power is non-increasing in the multiplier") {
  std::mt19937_64 rng(5);
  const auto s = random_setup(rng, 4, 4, 3);
  const auto sub = build_digital_subproblem(s.w_hat, s.channels, 4, s.eta, s.mu, 1.0);
  double prev = transmit_power(s.w_hat, solve_v(sub, 1e-6));
  for (double lambda = 1e-5; lambda < 1e3; lambda *= 3) {
    const double p = transmit_power(s.w_hat, solve_v(sub, lambda));
    CHECK(p <= prev * (1 + 1e-10));
    prev = p;
  }
}

TEST_CASE("single user gets a matched beam") {
  std::mt19937_64 rng(6);
  const auto s = random_setup(rng, 4, 4, 1);
  const auto sub = build_digital_subproblem(s.w_hat, s.channels, 4, s.eta, s.mu, 1e-3);
  const auto sol = solve_digital(sub, s.w_hat);
  const CVec h_bar = sub.effective.col(0);
  const double cosine = std::abs(h_bar.dot(sol.V.col(0))) / (h_bar.norm() * sol.V.col(0).norm());
  CHECK(cosine == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("digital step does not lower the surrogate") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_setup(rng, 4, 4, 4);
    const double P = 0.5;
    CMat V0 = random_cmat(rng, 4, 4);
    V0 *= std::sqrt(P / transmit_power(s.w_hat, V0));
    const CMat G0 = effective_gains(s.channels, s.w_hat, V0);
    const RVec eta = update_eta(G0, s.noise);
    const CVec mu = update_mu(G0, eta, s.noise);
    const auto sub = build_digital_subproblem(s.w_hat, s.channels, 4, eta, mu, P);
    const auto sol = solve_digital(sub, s.w_hat);
    const double before = eval_f2(G0, eta, mu, s.noise);
    const double after = eval_f2(effective_gains(s.channels, s.w_hat, sol.V), eta, mu, s.noise);
    CHECK(after >= before - 1e-9 * std::abs(before));
  }
}

TEST_CASE("invalid inputs") {
  std::mt19937_64 rng(8);
  const auto s = random_setup(rng, 4, 4, 2);
  CHECK_THROWS_AS(build_digital_subproblem(s.w_hat, s.channels, 4, s.eta, s.mu, 0.0), ConfigError);
  CHECK_THROWS_AS(build_digital_subproblem(s.w_hat, s.channels, 4, RVec::Zero(3), s.mu, 1.0), ConfigError);
}
