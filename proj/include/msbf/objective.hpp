// SPDX-License-Identifier: Apache-2.0
//
// Sum-rate evaluation and the fractional-programming surrogate.
//
// The analog beamformer is stored implicitly as the stacked vector w_hat of
// length M*N; W = diag(w_hat) * Phi, where Phi maps subarray m onto rows
// [m*N, (m+1)*N). Nothing here materialises the dense MN x M matrix.

#pragma once

#include <vector>

#include "msbf/common.hpp"
#include "msbf/geometry.hpp"

namespace msbf {

struct AuxState {
  RVec eta;  // per-user SINR surrogate, >= 0
  CVec mu;   // per-user scaled matched-filter response
};

struct BeamformerState {
  CVec w_hat;  // stacked analog weights, |w_hat[i]| <= 1
  CMat V;      // M x K digital beamformer
  SubarrayPositions positions;
};

/// G(k, j) = h_k^H W v_j.
CMat effective_gains(const std::vector<CVec>& channels, const CVec& w_hat, const CMat& V);

/// Sum of log2(1 + SINR_k) in bits/s/Hz.
double sum_rate(const CMat& G, const RVec& noise);

/// Per-user SINR; the optimal eta for fixed beamformers.
RVec update_eta(const CMat& G, const RVec& noise);

/// mu_k = sqrt(1 + eta_k) G(k, k) / A_k with A_k = sum_j |G(k, j)|^2 + noise_k.
CVec update_mu(const CMat& G, const RVec& eta, const RVec& noise);

/// f2 = sum_k 2 sqrt(1 + eta_k) Re{conj(mu_k) G(k, k)} - |mu_k|^2 A_k.
double eval_f2(const CMat& G, const RVec& eta, const CVec& mu, const RVec& noise);

/// Lower bound on the sum-rate for any (eta, mu), tight at (update_eta,
/// update_mu):
///   f1 = [sum_k ln(1 + eta_k) - eta_k + f2] / ln 2.
/// f1 changes exactly by delta(f2) / ln 2 when only the beamformers move.
double eval_f1(const CMat& G, const RVec& eta, const CVec& mu, const RVec& noise);

}  // namespace msbf
