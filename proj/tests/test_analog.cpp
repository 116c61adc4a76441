// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "msbf/oracles.hpp"
#include "support.hpp"

using namespace msbf;
using namespace msbf::test;

namespace {

struct Setup {
  std::vector<CVec> channels;
  CMat V;
  RVec eta;
  CVec mu;
  RVec noise;
  int M = 0;
};

Setup random_setup(std::mt19937_64& rng, int M, int N, int K) {
  Setup s;
  s.M = M;
  for (int k = 0; k < K; ++k) s.channels.push_back(random_cvec(rng, M * N));
  s.V = random_cmat(rng, M, K, 0.3);
  s.noise = RVec::Constant(K, 0.2);
  const CMat G = effective_gains(s.channels, random_phases(rng, M * N), s.V);
  s.eta = update_eta(G, s.noise);
  s.mu = update_mu(G, s.eta, s.noise);
  return s;
}

double f2_of(const Setup& s, const CVec& w) {
  return eval_f2(effective_gains(s.channels, w, s.V), s.eta, s.mu, s.noise);
}

AnalogSubproblem plain(int n, double P) {
  AnalogSubproblem sub;
  sub.T = CMat::Zero(n, n);
  sub.r = CVec::Zero(n);
  sub.v_hat = CMat::Ones(n, 1);
  sub.v_hat_energy = RVec::Ones(n);
  sub.power_budget = P;
  return sub;
}

}  // namespace

TEST_CASE("quadratic form") {
  std::mt19937_64 rng(1);
  SUBCASE("zero digital beamformer") {
    auto s = random_setup(rng, 4, 4, 2);
    s.V.setZero();
    const auto sub = build_quadratics(s.channels, s.V, s.eta, s.mu, 1.0, 30.0);
    CHECK(sub.T.norm() == 0.0);
    CHECK(sub.r.norm() == 0.0);
  }
  SUBCASE("single user, single subarray") {
    const CVec h = random_cvec(rng, 4);
    const RVec eta = RVec::Constant(1, 3.0);
    CVec mu(1);
    mu[0] = cplx(0.5, -0.2);
    const auto sub = build_quadratics({h}, CMat::Ones(1, 1), eta, mu, 1.0, 30.0);
    CHECK((sub.T - std::norm(mu[0]) * h * h.adjoint()).norm() < 1e-14);
    CHECK((sub.r - 2.0 * mu[0] * h).norm() < 1e-14);
  }
  SUBCASE("Hermitian positive semidefinite") {
    const auto s = random_setup(rng, 4, 4, 3);
    const auto sub = build_quadratics(s.channels, s.V, s.eta, s.mu, 1.0, 30.0);
    CHECK((sub.T - sub.T.adjoint()).norm() < 1e-12 * sub.T.norm());
    Eigen::SelfAdjointEigenSolver<CMat> eig(sub.T);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12 * eig.eigenvalues().maxCoeff());
  }
  SUBCASE("f4 increments equal f2 increments") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = random_setup(rng, 4, 4, 3);
      const auto sub = build_quadratics(s.channels, s.V, s.eta, s.mu, 1.0, 30.0);
      const CVec a = random_cvec(rng, 16);
      const CVec b = random_cvec(rng, 16);
      const double d2 = f2_of(s, a) - f2_of(s, b);
      const double d4 = eval_f4(sub, a) - eval_f4(sub, b);
      CHECK(std::abs(d2 - d4) < 1e-10 * std::max(1.0, std::abs(d2)));
    }
  }
  SUBCASE("power matches the dense product") {
    const auto s = random_setup(rng, 4, 4, 3);
    const auto sub = build_quadratics(s.channels, s.V, s.eta, s.mu, 1.0, 30.0);
    const CVec w = random_cvec(rng, 16);
    CHECK(analog_power(sub, w) == doctest::Approx(transmit_power(w, s.V)).epsilon(1e-12));
  }
}

TEST_CASE("projections") {
  CVec v(3);
  v << cplx(0, 2), cplx(0.5, 0), cplx(3, 4);
  const CVec p = project_unit_disk(v);
  CHECK(std::abs(p[0] - cplx(0, 1)) < 1e-15);
  CHECK(p[1] == cplx(0.5, 0));
  CHECK(std::abs(p[2] - cplx(0.6, 0.8)) < 1e-15);

  CMat z = CMat::Ones(2, 2);  // energy 4
  CHECK((project_power_ball(z, 1.0) - 0.5 * z).norm() < 1e-15);
  CHECK(project_power_ball(z, 4.0) == z);
  CHECK(project_power_ball(z, 10.0) == z);
}

TEST_CASE("w-update") {
  SUBCASE("no quadratic, no power coupling") {
    auto sub = plain(3, 10.0);
    sub.v_hat.setZero();
    sub.v_hat_energy.setZero();
    sub.r << 1.0, cplx(0, 2), 0.0;
    AdmmState st = warm_start(sub, CVec::Zero(3));
    st.kappa << 0.5, 0.0, cplx(0, -1);
    const CVec w = admm_w_update(sub, st);
    CHECK((w - (2.0 * sub.r + sub.rho * st.kappa) / sub.rho).norm() < 1e-14);
  }
  SUBCASE("minimises the augmented Lagrangian") {
    std::mt19937_64 rng(2);
    for (auto weight : {QuadraticWeight::kSurrogate, QuadraticWeight::kDoubled}) {
      const auto s = random_setup(rng, 4, 4, 3);
      const auto sub = build_quadratics(s.channels, s.V, s.eta, s.mu, 0.5, 30.0, weight);
      AdmmState st = warm_start(sub, random_phases(rng, 16));
      st.x = random_cvec(rng, 16, 0.1);
      st.z = random_cmat(rng, 16, 3, 0.1);
      const CVec w = admm_w_update(sub, st);
      const double at = augmented_lagrangian(sub, st, w);
      for (int trial = 0; trial < 30; ++trial)
        CHECK(augmented_lagrangian(sub, st, w + random_cvec(rng, 16, 1e-4)) >= at - 1e-12 * std::abs(at));
    }
  }
}

TEST_CASE("admm") {
  SUBCASE("single linear target") {
    auto sub = plain(3, 1e6);
    sub.r[0] = 1.0;
    const auto rep = admm_solve(sub, CVec::Zero(3), {1e-8, 5000});
    CHECK(rep.converged);
    CHECK(std::abs(rep.w_hat[0] - 1.0) < 1e-3);
    CHECK(std::abs(rep.w_hat[1]) < 1e-6);
  }
  SUBCASE("zero problem stays at zero") {
    const auto sub = plain(4, 1.0);
    const auto rep = admm_solve(sub, CVec::Zero(4));
    CHECK(rep.converged);
    CHECK(rep.w_hat.norm() == 0.0);
  }
  SUBCASE("output is feasible and the residual falls") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = random_setup(rng, 4, 4, 3);
      const double P = 0.5 * transmit_power(CVec::Ones(16), s.V);
      const auto sub = build_quadratics(s.channels, s.V, s.eta, s.mu, P, 30.0);
      const auto rep = admm_solve(sub, random_phases(rng, 16));
      CHECK(rep.w_hat.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
      CHECK(analog_power(sub, rep.w_hat) <= P * (1 + 1e-12));
      CHECK(rep.final_residual <= rep.initial_residual);
      CHECK(rep.primal_residuals.size() == static_cast<std::size_t>(rep.iterations));
    }
  }
  SUBCASE("close to the projected-gradient reference") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
      const auto s = random_setup(rng, 2, 4, 2);
      const double P = 0.6 * transmit_power(CVec::Ones(8), s.V);
      const auto sub = build_quadratics(s.channels, s.V, s.eta, s.mu, P, 30.0);
      const CVec start = random_phases(rng, 8);
      const auto rep = admm_solve(sub, start, {1e-4, 200000});
      const CVec ref = maximize_f4_reference(sub, {start, CVec::Zero(8)});
      CHECK(eval_f4(sub, rep.w_hat) >= eval_f4(sub, ref) - 1e-3 * std::max(1.0, std::abs(eval_f4(sub, ref))));
    }
  }
  CHECK_THROWS_AS(admm_solve(plain(3, 1.0), CVec::Zero(4)), ConfigError);
}

TEST_CASE("reference projection") {
  CVec y(2);
  y << 2.0, 0.5;
  const CVec p = project_peak_and_power(y, RVec::Ones(2), 100.0);
  CHECK(std::abs(p[0] - 1.0) < 1e-12);
  CHECK(std::abs(p[1] - 0.5) < 1e-12);
  const CVec q = project_peak_and_power(y, RVec::Ones(2), 0.01);
  CHECK(q.squaredNorm() <= 0.01 * (1 + 1e-9));
  CHECK(q.squaredNorm() >= 0.01 * (1 - 1e-6));
}

TEST_CASE("W assembly") {
  CVec w(4);
  w << 1.0, cplx(0, 1), -1.0, cplx(0, -1);
  const CMat W = assemble_W(w, 2);
  CHECK(W.rows() == 4);
  CHECK(W.cols() == 2);
  CHECK(W(0, 0) == cplx(1.0));
  CHECK(W(1, 0) == cplx(0, 1));
  CHECK(W(2, 0) == cplx(0.0));
  CHECK(W(2, 1) == cplx(-1.0));
  CHECK(W(0, 1) == cplx(0.0));
  CHECK_THROWS_AS(assemble_W(w, 3), ConfigError);

  CVec u(3);
  u << cplx(0, 0), cplx(3, 4), cplx(0.1, 0);
  const CVec um = to_unit_modulus(u);
  CHECK(um[0] == cplx(1.0));
  CHECK(std::abs(um[1] - cplx(0.6, 0.8)) < 1e-15);
  CHECK(um[2] == cplx(1.0));
}
