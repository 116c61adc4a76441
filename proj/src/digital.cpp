// SPDX-License-Identifier: Apache-2.0

#include "msbf/digital.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace msbf {

CMat effective_channel(const CVec& w_hat, const std::vector<CVec>& channels, int num_subarrays) {
  const Eigen::Index M = num_subarrays;
  if (M < 1 || w_hat.size() % M != 0)
    throw ConfigError("effective_channel: w_hat length is not a multiple of M");
  const Eigen::Index N = w_hat.size() / M;
  CMat out(M, static_cast<Eigen::Index>(channels.size()));
  for (Eigen::Index k = 0; k < out.cols(); ++k) {
    if (channels[k].size() != w_hat.size())
      throw ConfigError("effective_channel: channel length does not match w_hat");
    for (Eigen::Index m = 0; m < M; ++m)
      out(m, k) = w_hat.segment(m * N, N).dot(channels[k].segment(m * N, N));
  }
  return out;
}

DigitalSubproblem build_digital_subproblem(const CVec& w_hat, const std::vector<CVec>& channels,
                                           int num_subarrays, const RVec& eta, const CVec& mu,
                                           double power_budget) {
  if (!(power_budget > 0.0)) throw ConfigError("digital: power budget must be positive");
  DigitalSubproblem sub;
  sub.effective = effective_channel(w_hat, channels, num_subarrays);
  const Eigen::Index M = sub.effective.rows();
  const Eigen::Index K = sub.effective.cols();
  if (eta.size() != K || mu.size() != K) throw ConfigError("digital: auxiliaries must have K entries");
  const Eigen::Index N = w_hat.size() / M;

  sub.B_sum = CMat::Zero(M, M);
  sub.targets.resize(M, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const CVec& h = sub.effective.col(k);
    sub.B_sum.noalias() += std::norm(mu[k]) * h * h.adjoint();
    sub.targets.col(k) = std::sqrt(1.0 + eta[k]) * mu[k] * h;
  }
  sub.gram = CMat::Zero(M, M);
  for (Eigen::Index m = 0; m < M; ++m) sub.gram(m, m) = w_hat.segment(m * N, N).squaredNorm();
  sub.power_budget = power_budget;
  return sub;
}

CMat solve_v(const DigitalSubproblem& sub, double multiplier) {
  CMat A = sub.B_sum + multiplier * sub.gram;
  A = 0.5 * (A + A.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> eig(A);
  if (eig.info() != Eigen::Success) throw SolverError("solve_v: Hermitian eigendecomposition failed");
  const RVec& values = eig.eigenvalues();
  const double cutoff = 1e-12 * std::max(values.cwiseAbs().maxCoeff(), 0.0);
  RVec inv = RVec::Zero(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values[i] > cutoff && values[i] > 0.0) inv[i] = 1.0 / values[i];
  const CMat& U = eig.eigenvectors();
  return U * inv.asDiagonal() * (U.adjoint() * sub.targets);
}

double transmit_power(const CVec& w_hat, const CMat& V) {
  const Eigen::Index M = V.rows();
  if (M == 0 || w_hat.size() % M != 0)
    throw ConfigError("transmit_power: w_hat length is not a multiple of M");
  const Eigen::Index N = w_hat.size() / M;
  double power = 0.0;
  for (Eigen::Index m = 0; m < M; ++m)
    power += w_hat.segment(m * N, N).squaredNorm() * V.row(m).squaredNorm();
  return power;
}

DigitalSolution solve_digital(const DigitalSubproblem& sub, const CVec& w_hat,
                              const DigitalOptions& options) {
  const double P = sub.power_budget;
  DigitalSolution out;
  out.V = solve_v(sub, 0.0);
  out.power = transmit_power(w_hat, out.V);
  if (out.power <= P) return out;

  double lo = 0.0;
  double hi = 1.0;
  CMat V_hi = solve_v(sub, hi);
  double p_hi = transmit_power(w_hat, V_hi);
  int iter = 0;
  while (p_hi > P) {
    if (++iter > options.max_iterations) {
      std::ostringstream msg;
      msg << "solve_digital: no feasible multiplier after " << iter - 1
          << " doublings (lambda=" << hi << ", power=" << p_hi << ", budget=" << P << ")";
      throw SolverError(msg.str());
    }
    lo = hi;
    hi *= 2.0;
    V_hi = solve_v(sub, hi);
    p_hi = transmit_power(w_hat, V_hi);
  }
  // Invariant: power(lo) > P >= power(hi); keep the feasible end.
  while (P - p_hi > options.power_tolerance * P) {
    if (++iter > options.max_iterations) {
      std::ostringstream msg;
      msg << "solve_digital: bisection did not reach tolerance (lambda in [" << lo << ", " << hi
          << "], power=" << p_hi << ", budget=" << P << ")";
      throw SolverError(msg.str());
    }
    const double mid = 0.5 * (lo + hi);
    CMat V_mid = solve_v(sub, mid);
    const double p_mid = transmit_power(w_hat, V_mid);
    if (p_mid > P) {
      lo = mid;
    } else {
      hi = mid;
      V_hi = std::move(V_mid);
      p_hi = p_mid;
    }
  }
  out.V = std::move(V_hi);
  out.power = p_hi;
  out.multiplier = hi;
  out.iterations = iter;
  return out;
}

}  // namespace msbf
