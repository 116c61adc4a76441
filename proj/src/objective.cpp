// SPDX-License-Identifier: Apache-2.0

#include "msbf/objective.hpp"

#include <cmath>

namespace msbf {

namespace {

void check_gain_shape(const CMat& G, const RVec& noise) {
  if (G.rows() != G.cols() || G.rows() != noise.size())
    throw ConfigError("objective: gain matrix must be K x K with K noise powers");
}

}  // namespace

CMat effective_gains(const std::vector<CVec>& channels, const CVec& w_hat, const CMat& V) {
  const auto K = static_cast<Eigen::Index>(channels.size());
  const Eigen::Index M = V.rows();
  if (M == 0 || w_hat.size() % M != 0)
    throw ConfigError("effective_gains: w_hat length is not a multiple of M");
  const Eigen::Index N = w_hat.size() / M;
  if (V.cols() != K) throw ConfigError("effective_gains: V must have one column per user");

  // h_bar_k[m] = w_m^H h_k restricted to block m; then G = H_bar^H V.
  CMat H_bar(M, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (channels[k].size() != w_hat.size())
      throw ConfigError("effective_gains: channel length does not match w_hat");
    for (Eigen::Index m = 0; m < M; ++m)
      H_bar(m, k) = w_hat.segment(m * N, N).dot(channels[k].segment(m * N, N));
  }
  return H_bar.adjoint() * V;
}

RVec update_eta(const CMat& G, const RVec& noise) {
  check_gain_shape(G, noise);
  const Eigen::Index K = G.rows();
  RVec eta(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double signal = std::norm(G(k, k));
    const double interference = G.row(k).squaredNorm() - signal;
    eta[k] = signal / (std::max(interference, 0.0) + noise[k]);
  }
  return eta;
}

double sum_rate(const CMat& G, const RVec& noise) {
  const RVec eta = update_eta(G, noise);
  double rate = 0.0;
  for (Eigen::Index k = 0; k < eta.size(); ++k) rate += std::log2(1.0 + eta[k]);
  return rate;
}

CVec update_mu(const CMat& G, const RVec& eta, const RVec& noise) {
  check_gain_shape(G, noise);
  const Eigen::Index K = G.rows();
  CVec mu(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double A = G.row(k).squaredNorm() + noise[k];
    mu[k] = std::sqrt(1.0 + eta[k]) * G(k, k) / A;
  }
  return mu;
}

double eval_f2(const CMat& G, const RVec& eta, const CVec& mu, const RVec& noise) {
  check_gain_shape(G, noise);
  double f2 = 0.0;
  for (Eigen::Index k = 0; k < G.rows(); ++k) {
    const double A = G.row(k).squaredNorm() + noise[k];
    f2 += 2.0 * std::sqrt(1.0 + eta[k]) * std::real(std::conj(mu[k]) * G(k, k)) - std::norm(mu[k]) * A;
  }
  return f2;
}

double eval_f1(const CMat& G, const RVec& eta, const CVec& mu, const RVec& noise) {
  double f1 = eval_f2(G, eta, mu, noise);
  for (Eigen::Index k = 0; k < eta.size(); ++k) f1 += std::log1p(eta[k]) - eta[k];
  return f1 / std::numbers::ln2;
}

}  // namespace msbf
