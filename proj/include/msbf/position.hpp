// SPDX-License-Identifier: Apache-2.0
//
// Per-subarray position update. With the beamformers, FP auxiliaries and the
// other subarrays fixed, the surrogate depends on t_m only through
//
//     f6(t_m) = sum_k 2 Re{c_k(t_m)^H f_k} - |mu_k|^2 c_k(t_m)^H X_mm c_k(t_m)
//
// where c_k(t_m) is user k's channel block on subarray m.

#pragma once

#include <vector>

#include "msbf/common.hpp"
#include "msbf/geometry.hpp"

namespace msbf {

/// c_k(t): user k's channel on one subarray whose reference point sits at t.
CVec subarray_gain(const Scenario& scenario, const ArrayGeometry& geometry, int user, const Vec2& t);

/// d c_k / d t as a 2 x N matrix (rows: x, y). Far-field responses are
/// independent of t.
CMat gain_jacobian(const Scenario& scenario, const ArrayGeometry& geometry, int user, const Vec2& t);

struct PositionSubproblem {
  const Scenario* scenario = nullptr;
  const ArrayGeometry* geometry = nullptr;
  int subarray = 0;
  CMat omega_m;       // N x K, column k is the m-th segment of W v_k
  CMat X_mm;          // N x N
  CMat f;             // N x K, linear terms
  RVec mu_abs2;       // |mu_k|^2
};

/// X blocks of sum_j omega_j omega_j^H: X_ij = sum_k omega_{k,i} omega_{k,j}^H.
CMat cross_block(const std::vector<CVec>& omega, int N, int i, int j);

/// Builds f6 for subarray m. `channels` must be the current hybrid channels
/// (their blocks i != m supply c_k(t_i)).
PositionSubproblem build_position_subproblem(const Scenario& scenario, const ArrayGeometry& geometry,
                                             const std::vector<CVec>& channels, const CVec& w_hat,
                                             const CMat& V, const RVec& eta, const CVec& mu, int m);

double eval_f6(const PositionSubproblem& sub, const Vec2& t);

Vec2 grad_f6(const PositionSubproblem& sub, const Vec2& t);

/// Component-wise clamp onto the box.
Vec2 project_region(const Vec2& t, const RegionBox& box);

struct PositionStep {
  Vec2 position;
  double value_before = 0.0;
  double value_after = 0.0;
  int trials = 0;
  bool moved = false;
};

/// How the backtracking step turns tau into a displacement.
enum class StepRule {
  kUnitDirection,  // t + tau * grad / ||grad||; tau is a length in meters
  kRawGradient,    // t + tau * grad
};

/// One projected backtracking pass: candidates t + tau * d (projected onto
/// the box) for tau = tau0, tau0/2, ... while tau > min_step; the first
/// candidate that strictly improves f6 is accepted, otherwise t stays put.
PositionStep optimize_position(const PositionSubproblem& sub, const Vec2& t_init, const RegionBox& box,
                               double tau0, double min_step, StepRule rule = StepRule::kUnitDirection);

/// Grid search over the box with the given pitch (box edges included). The
/// current point is kept unless a grid point is strictly better.
PositionStep exhaustive_position(const PositionSubproblem& sub, const Vec2& t_init, const RegionBox& box,
                                 double grid_step, long max_points);

/// Number of grid points exhaustive_position would evaluate.
long grid_point_count(const RegionBox& box, double grid_step);

}  // namespace msbf
