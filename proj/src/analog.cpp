// SPDX-License-Identifier: Apache-2.0

#include "msbf/analog.hpp"

#include <cmath>

namespace msbf {

namespace {

double max_abs(const CVec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
double max_abs(const CMat& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

CMat scaled_columns(const CMat& v_hat, const CVec& w) { return v_hat.array().colwise() * w.array(); }

}  // namespace

AnalogSubproblem build_quadratics(const std::vector<CVec>& channels, const CMat& V, const RVec& eta,
                                  const CVec& mu, double power_budget, double rho,
                                  QuadraticWeight weight) {
  const Eigen::Index M = V.rows();
  const Eigen::Index K = V.cols();
  if (static_cast<Eigen::Index>(channels.size()) != K || eta.size() != K || mu.size() != K)
    throw ConfigError("build_quadratics: expected one channel and one auxiliary pair per user");
  if (M == 0 || channels.front().size() % M != 0)
    throw ConfigError("build_quadratics: channel length is not a multiple of M");
  if (!(rho > 0.0)) throw ConfigError("build_quadratics: rho must be positive");
  const Eigen::Index MN = channels.front().size();
  const Eigen::Index N = MN / M;

  AnalogSubproblem sub;
  sub.power_budget = power_budget;
  sub.rho = rho;
  sub.weight = weight;
  sub.v_hat.resize(MN, K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index m = 0; m < M; ++m) sub.v_hat.col(k).segment(m * N, N).setConstant(V(m, k));
  sub.v_hat_energy = sub.v_hat.cwiseAbs2().rowwise().sum();

  // Column j of H_k is h_hat_{k,j} = conj(v_hat_j) .* h_k.
  const CMat v_conj = sub.v_hat.conjugate();
  sub.T = CMat::Zero(MN, MN);
  sub.r = CVec::Zero(MN);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (channels[k].size() != MN) throw ConfigError("build_quadratics: channel lengths differ");
    const CMat H = v_conj.array().colwise() * channels[k].array();
    sub.T.noalias() += std::norm(mu[k]) * H * H.adjoint();
    sub.r += std::sqrt(1.0 + eta[k]) * mu[k] * H.col(k);
  }
  return sub;
}

double eval_f4(const AnalogSubproblem& sub, const CVec& w_hat) {
  const double quad = std::real(w_hat.dot(sub.T * w_hat));
  return 2.0 * std::real(sub.r.dot(w_hat)) - quadratic_weight(sub.weight) * quad;
}

double analog_power(const AnalogSubproblem& sub, const CVec& w_hat) {
  return (sub.v_hat_energy.array() * w_hat.cwiseAbs2().array()).sum();
}

CVec project_unit_disk(const CVec& v) {
  CVec out = v;
  for (auto& u : out) {
    const double mag = std::abs(u);
    if (mag > 1.0) u /= mag;
  }
  return out;
}

CMat project_power_ball(const CMat& zeta, double power_budget) {
  const double energy = zeta.squaredNorm();
  if (energy <= power_budget) return zeta;
  return zeta * std::sqrt(power_budget / energy);
}

double augmented_lagrangian(const AnalogSubproblem& sub, const AdmmState& state, const CVec& w_hat) {
  const double consensus = (state.kappa - w_hat + state.x).squaredNorm();
  const double split = (state.zeta - scaled_columns(sub.v_hat, w_hat) + state.z).squaredNorm();
  return -eval_f4(sub, w_hat) + 0.5 * sub.rho * (consensus + split);
}

WUpdateSolver::WUpdateSolver(const AnalogSubproblem& sub) {
  CMat system = 2.0 * quadratic_weight(sub.weight) * sub.T;
  system.diagonal().array() += sub.rho * (1.0 + sub.v_hat_energy.array());
  llt_.compute(system);
  if (llt_.info() != Eigen::Success)
    throw SolverError("admm: w-update system matrix is not positive definite");
}

CVec WUpdateSolver::solve(const AnalogSubproblem& sub, const AdmmState& state) const {
  CVec theta = 2.0 * sub.r + sub.rho * (state.kappa + state.x);
  theta += sub.rho * (sub.v_hat.conjugate().cwiseProduct(state.zeta + state.z)).rowwise().sum();
  return llt_.solve(theta);
}

CVec admm_w_update(const AnalogSubproblem& sub, const AdmmState& state) {
  return WUpdateSolver(sub).solve(sub, state);
}

AdmmState warm_start(const AnalogSubproblem& sub, const CVec& w_init) {
  AdmmState s;
  s.w_hat = w_init;
  s.kappa = project_unit_disk(w_init);
  s.zeta = scaled_columns(sub.v_hat, w_init);
  s.x = CVec::Zero(w_init.size());
  s.z = CMat::Zero(sub.v_hat.rows(), sub.v_hat.cols());
  return s;
}

AdmmReport admm_solve(const AnalogSubproblem& sub, const CVec& w_init, const AdmmOptions& options) {
  if (w_init.size() != sub.r.size()) throw ConfigError("admm_solve: w_init has the wrong length");
  const WUpdateSolver solver(sub);
  AdmmState s = warm_start(sub, w_init);
  AdmmReport report;

  for (int it = 1; it <= options.max_iterations; ++it) {
    s.w_hat = solver.solve(sub, s);
    const CVec kappa_prev = s.kappa;
    const CMat zeta_prev = s.zeta;
    const CMat vw = scaled_columns(sub.v_hat, s.w_hat);
    s.kappa = project_unit_disk(s.w_hat - s.x);
    s.zeta = project_power_ball(vw - s.z, sub.power_budget);
    s.x += s.kappa - s.w_hat;
    s.z += s.zeta - vw;
    s.iterations = it;

    const double primal = std::max(max_abs(CVec(s.kappa - s.w_hat)), max_abs(CMat(s.zeta - vw)));
    // Dual residual rho * A^H (splitting-variable change).
    const CVec dual = sub.rho * (s.kappa - kappa_prev +
                                 (sub.v_hat.conjugate().cwiseProduct(s.zeta - zeta_prev)).rowwise().sum());
    report.primal_residuals.push_back(primal);
    if (it == 1) report.initial_residual = primal;
    report.final_residual = primal;
    if (primal <= options.tolerance && max_abs(dual) <= options.tolerance) {
      report.converged = true;
      break;
    }
  }
  report.iterations = s.iterations;

  CVec w = project_unit_disk(s.w_hat);
  const double power = analog_power(sub, w);
  if (power > sub.power_budget) w *= std::sqrt(sub.power_budget / power);
  report.w_hat = std::move(w);
  return report;
}

CMat assemble_W(const CVec& w_hat, int num_subarrays) {
  const Eigen::Index M = num_subarrays;
  if (M < 1 || w_hat.size() % M != 0) throw ConfigError("assemble_W: w_hat length is not a multiple of M");
  const Eigen::Index N = w_hat.size() / M;
  CMat W = CMat::Zero(w_hat.size(), M);
  for (Eigen::Index m = 0; m < M; ++m) W.col(m).segment(m * N, N) = w_hat.segment(m * N, N);
  return W;
}

CVec to_unit_modulus(const CVec& w_hat) {
  CVec out = w_hat;
  for (auto& u : out) {
    const double mag = std::abs(u);
    u = mag > 0.0 ? u / mag : cplx(1.0, 0.0);
  }
  return out;
}

}  // namespace msbf
