// SPDX-License-Identifier: Apache-2.0
//
// Digital beamformer update: for fixed analog weights and FP auxiliaries the
// surrogate is a concave quadratic in each column of V, solved in closed form
// with a Lagrange multiplier on the total transmit power.

#pragma once

#include <vector>

#include "msbf/common.hpp"

namespace msbf {

struct DigitalSubproblem {
  CMat effective;  // M x K, column k is W^H h_k
  CMat B_sum;      // sum_j |mu_j|^2 h_bar_j h_bar_j^H
  CMat gram;       // W^H W (diagonal for a sub-connected array)
  CMat targets;    // M x K, column k is sqrt(1 + eta_k) mu_k h_bar_k
  double power_budget = 0.0;
};

struct DigitalOptions {
  double power_tolerance = 1e-6;  // relative, on |power - P|
  int max_iterations = 100;       // doublings plus halvings
};

struct DigitalSolution {
  CMat V;
  double multiplier = 0.0;  // lambda*
  double power = 0.0;
  int iterations = 0;
};

/// Column k is W^H h_k; entry m sums conj(w_hat) * h over block m.
CMat effective_channel(const CVec& w_hat, const std::vector<CVec>& channels, int num_subarrays);

DigitalSubproblem build_digital_subproblem(const CVec& w_hat, const std::vector<CVec>& channels,
                                           int num_subarrays, const RVec& eta, const CVec& mu,
                                           double power_budget);

/// Minimum-norm solution of (B_sum + lambda * gram) V = targets.
CMat solve_v(const DigitalSubproblem& sub, double multiplier);

/// Sum_k ||W v_k||^2.
double transmit_power(const CVec& w_hat, const CMat& V);

/// Smallest lambda >= 0 meeting the power budget, found by doubling then
/// bisection. The returned V never exceeds the budget.
DigitalSolution solve_digital(const DigitalSubproblem& sub, const CVec& w_hat,
                              const DigitalOptions& options = {});

}  // namespace msbf
