// SPDX-License-Identifier: Apache-2.0
//
// Analog beamformer update by scaled-form ADMM.
//
// With V, positions and the FP auxiliaries fixed, the surrogate restricted to
// the stacked analog weights w is the concave quadratic
//
//     f4(w) = 2 Re{r^H w} - q * w^H T w
//
// maximised over the peak-amplitude set |w_i| <= 1 and the power set
// sum_k ||diag(Phi v_k) w||^2 <= P. With q = 1 the increments of f4 equal the
// increments of the full surrogate f2; the w-update system matrix is then
// 2T + rho I + rho V_hat. QuadraticWeight::kDoubled (q = 2) reproduces the
// printed objective 2 Re{r^H w - w^H T w}, whose stationarity gives 4T.

#pragma once

#include <vector>

#include "msbf/common.hpp"

namespace msbf {

enum class QuadraticWeight { kSurrogate, kDoubled };

inline double quadratic_weight(QuadraticWeight q) { return q == QuadraticWeight::kDoubled ? 2.0 : 1.0; }

struct AnalogSubproblem {
  CMat T;              // MN x MN Hermitian PSD
  CVec r;              // MN
  CMat v_hat;          // MN x K; column k is diag(Phi v_k)
  RVec v_hat_energy;   // diagonal of V_hat = sum_k |v_hat_k|^2
  double power_budget = 0.0;
  double rho = 30.0;
  QuadraticWeight weight = QuadraticWeight::kSurrogate;
};

struct AdmmState {
  CVec w_hat;
  CVec kappa;
  CMat zeta;  // MN x K
  CVec x;     // scaled dual for kappa = w
  CMat z;     // scaled duals for zeta_k = v_hat_k w
  int iterations = 0;
};

struct AdmmOptions {
  double tolerance = 1e-4;  // on primal and dual residuals (infinity norm)
  int max_iterations = 300;
};

struct AdmmReport {
  CVec w_hat;
  int iterations = 0;
  bool converged = false;
  double initial_residual = 0.0;
  double final_residual = 0.0;  // primal, before the final feasibility step
  std::vector<double> primal_residuals;
};

/// T, r and the per-user diagonals for the current V, channels and
/// auxiliaries. h_hat_{k,j}[i] = conj(v_j[m(i)]) h_k[i].
AnalogSubproblem build_quadratics(const std::vector<CVec>& channels, const CMat& V, const RVec& eta,
                                  const CVec& mu, double power_budget, double rho,
                                  QuadraticWeight weight = QuadraticWeight::kSurrogate);

/// f4 under the subproblem's quadratic weight.
double eval_f4(const AnalogSubproblem& sub, const CVec& w_hat);

/// Sum_k ||v_hat_k .* w||^2.
double analog_power(const AnalogSubproblem& sub, const CVec& w_hat);

/// Entrywise radial projection onto the closed unit disk.
CVec project_unit_disk(const CVec& v);

/// Uniform scaling of all columns onto {sum ||zeta_k||^2 <= P}.
CMat project_power_ball(const CMat& zeta, double power_budget);

/// Augmented Lagrangian of the splitting, with the indicator terms dropped.
double augmented_lagrangian(const AnalogSubproblem& sub, const AdmmState& state, const CVec& w_hat);

/// Cached factorisation of the w-update system matrix.
class WUpdateSolver {
 public:
  explicit WUpdateSolver(const AnalogSubproblem& sub);
  [[nodiscard]] CVec solve(const AnalogSubproblem& sub, const AdmmState& state) const;

 private:
  Eigen::LLT<CMat> llt_;
};

/// Closed-form minimiser of the augmented Lagrangian over w.
CVec admm_w_update(const AnalogSubproblem& sub, const AdmmState& state);

/// State with kappa = proj(w), zeta_k = v_hat_k w and zero duals.
AdmmState warm_start(const AnalogSubproblem& sub, const CVec& w_init);

/// Runs ADMM from `w_init` and returns a point that satisfies both the peak
/// and the power constraints exactly (the kappa projection followed by a
/// uniform power rescale when needed).
AdmmReport admm_solve(const AnalogSubproblem& sub, const CVec& w_init, const AdmmOptions& options = {});

/// Dense W = diag(w_hat) Phi, for tests and diagnostics.
CMat assemble_W(const CVec& w_hat, int num_subarrays);

/// Entrywise unit-modulus renormalisation; zero entries map to 1.
CVec to_unit_modulus(const CVec& w_hat);

}  // namespace msbf
