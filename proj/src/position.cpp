// SPDX-License-Identifier: Apache-2.0

#include "msbf/position.hpp"

#include <cmath>

namespace msbf {

namespace {

constexpr double kMinDistance = 1e-6;

std::vector<double> axis_points(double lo, double hi, double step) {
  std::vector<double> out;
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  out.reserve(count + 2);
  for (long i = 0; i <= count; ++i) out.push_back(lo + i * step);
  if (hi - out.back() > 1e-12 * std::max(1.0, std::abs(hi))) out.push_back(hi);
  return out;
}

}  // namespace

CVec subarray_gain(const Scenario& scenario, const ArrayGeometry& geometry, int user, const Vec2& t) {
  CVec c = CVec::Zero(geometry.antennas_per_subarray);
  for (const auto& path : scenario.users.at(user).paths) {
    const cplx b = inter_subarray_phase(t, path.location, geometry.wavelength);
    c += path.gain * b * far_field_response(geometry, path.direction);
  }
  return c;
}

CMat gain_jacobian(const Scenario& scenario, const ArrayGeometry& geometry, int user, const Vec2& t) {
  const double k0 = 2.0 * kPi / geometry.wavelength;
  CMat J = CMat::Zero(2, geometry.antennas_per_subarray);
  for (const auto& path : scenario.users.at(user).paths) {
    const Vec3 diff = Vec3(t.x(), t.y(), 0.0) - path.location;
    const double dist = diff.norm();
    if (dist < kMinDistance) throw GeometryError("gain_jacobian: source coincides with the subarray");
    const cplx b = std::polar(1.0, -k0 * dist);
    const CVec term = cplx(0.0, -k0) * path.gain * b * far_field_response(geometry, path.direction);
    J.row(0) += (diff.x() / dist) * term.transpose();
    J.row(1) += (diff.y() / dist) * term.transpose();
  }
  return J;
}

CMat cross_block(const std::vector<CVec>& omega, int N, int i, int j) {
  CMat X = CMat::Zero(N, N);
  for (const auto& w : omega) X.noalias() += w.segment(i * N, N) * w.segment(j * N, N).adjoint();
  return X;
}

PositionSubproblem build_position_subproblem(const Scenario& scenario, const ArrayGeometry& geometry,
                                             const std::vector<CVec>& channels, const CVec& w_hat,
                                             const CMat& V, const RVec& eta, const CVec& mu, int m) {
  const int M = geometry.num_subarrays;
  const int N = geometry.antennas_per_subarray;
  const auto K = static_cast<Eigen::Index>(scenario.users.size());
  if (m < 0 || m >= M) throw ConfigError("position: subarray index out of range");
  if (V.rows() != M || V.cols() != K || w_hat.size() != M * N ||
      static_cast<Eigen::Index>(channels.size()) != K || eta.size() != K || mu.size() != K)
    throw ConfigError("position: inconsistent dimensions");

  // omega_k = W v_k.
  std::vector<CVec> omega(K, CVec(M * N));
  for (Eigen::Index k = 0; k < K; ++k)
    for (int i = 0; i < M; ++i) omega[k].segment(i * N, N) = w_hat.segment(i * N, N) * V(i, k);

  PositionSubproblem sub;
  sub.scenario = &scenario;
  sub.geometry = &geometry;
  sub.subarray = m;
  sub.omega_m.resize(N, K);
  for (Eigen::Index k = 0; k < K; ++k) sub.omega_m.col(k) = omega[k].segment(m * N, N);
  sub.X_mm = cross_block(omega, N, m, m);
  sub.mu_abs2 = mu.cwiseAbs2();

  // sum_{i != m} X_mi c_k(t_i) = sum_j omega_{j,m} (sum_{i != m} omega_{j,i}^H c_k(t_i)).
  sub.f.resize(N, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    CVec cross = CVec::Zero(N);
    for (Eigen::Index j = 0; j < K; ++j) {
      cplx inner = 0.0;
      for (int i = 0; i < M; ++i)
        if (i != m) inner += omega[j].segment(i * N, N).dot(channels[k].segment(i * N, N));
      cross += omega[j].segment(m * N, N) * inner;
    }
    sub.f.col(k) = std::sqrt(1.0 + eta[k]) * std::conj(mu[k]) * sub.omega_m.col(k) - sub.mu_abs2[k] * cross;
  }
  return sub;
}

double eval_f6(const PositionSubproblem& sub, const Vec2& t) {
  double value = 0.0;
  for (Eigen::Index k = 0; k < sub.f.cols(); ++k) {
    const CVec c = subarray_gain(*sub.scenario, *sub.geometry, static_cast<int>(k), t);
    value += 2.0 * std::real(c.dot(sub.f.col(k))) - sub.mu_abs2[k] * std::real(c.dot(sub.X_mm * c));
  }
  return value;
}

Vec2 grad_f6(const PositionSubproblem& sub, const Vec2& t) {
  Vec2 grad = Vec2::Zero();
  for (Eigen::Index k = 0; k < sub.f.cols(); ++k) {
    const int user = static_cast<int>(k);
    const CVec c = subarray_gain(*sub.scenario, *sub.geometry, user, t);
    const CMat J = gain_jacobian(*sub.scenario, *sub.geometry, user, t);
    const CVec Xc = sub.X_mm * c;
    for (int p = 0; p < 2; ++p) {
      const CVec dc = J.row(p).transpose();
      grad[p] += 2.0 * std::real(dc.dot(sub.f.col(k))) - sub.mu_abs2[k] * 2.0 * std::real(dc.dot(Xc));
    }
  }
  return grad;
}

Vec2 project_region(const Vec2& t, const RegionBox& box) {
  return {std::max(box.x_lo, std::min(t.x(), box.x_hi)), std::max(box.y_lo, std::min(t.y(), box.y_hi))};
}

PositionStep optimize_position(const PositionSubproblem& sub, const Vec2& t_init, const RegionBox& box,
                               double tau0, double min_step, StepRule rule) {
  PositionStep step;
  step.position = t_init;
  step.value_before = eval_f6(sub, t_init);
  step.value_after = step.value_before;
  if (box.degenerate()) return step;

  const Vec2 grad = grad_f6(sub, t_init);
  if (grad.isZero(0.0)) return step;
  const Vec2 direction = rule == StepRule::kUnitDirection ? Vec2(grad.normalized()) : grad;
  for (double tau = tau0; tau > min_step; tau *= 0.5) {
    const Vec2 candidate = project_region(t_init + tau * direction, box);
    ++step.trials;
    if (candidate == t_init) continue;
    const double value = eval_f6(sub, candidate);
    if (value > step.value_before) {
      step.position = candidate;
      step.value_after = value;
      step.moved = true;
      break;
    }
  }
  return step;
}

long grid_point_count(const RegionBox& box, double grid_step) {
  if (!(grid_step > 0.0)) throw ConfigError("exhaustive: grid step must be positive");
  const auto nx = static_cast<long>(axis_points(box.x_lo, box.x_hi, grid_step).size());
  const auto ny = static_cast<long>(axis_points(box.y_lo, box.y_hi, grid_step).size());
  return nx * ny;
}

PositionStep exhaustive_position(const PositionSubproblem& sub, const Vec2& t_init, const RegionBox& box,
                                 double grid_step, long max_points) {
  const long count = grid_point_count(box, grid_step);
  if (count > max_points)
    throw ConfigError("exhaustive: grid has " + std::to_string(count) + " points, above the cap of " +
                      std::to_string(max_points) + "; use a smaller region or a coarser step");
  PositionStep step;
  step.position = t_init;
  step.value_before = eval_f6(sub, t_init);
  step.value_after = step.value_before;
  for (double y : axis_points(box.y_lo, box.y_hi, grid_step)) {
    for (double x : axis_points(box.x_lo, box.x_hi, grid_step)) {
      const Vec2 candidate(x, y);
      const double value = eval_f6(sub, candidate);
      ++step.trials;
      if (value > step.value_after) {
        step.position = candidate;
        step.value_after = value;
        step.moved = true;
      }
    }
  }
  return step;
}

}  // namespace msbf
