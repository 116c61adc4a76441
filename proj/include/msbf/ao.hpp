// SPDX-License-Identifier: Apache-2.0
//
// Alternating optimisation of the digital beamformer, the analog beamformer
// and the subarray positions, plus the fixed-position baselines.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msbf/analog.hpp"
#include "msbf/common.hpp"
#include "msbf/geometry.hpp"
#include "msbf/objective.hpp"
#include "msbf/position.hpp"

namespace msbf {

enum class Scheme { kProposed, kSparseUpa, kDenseUpa, kExhaustive };

std::string_view scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);
inline bool moves_subarrays(Scheme s) { return s == Scheme::kProposed || s == Scheme::kExhaustive; }

struct AOConfig {
  double power_budget = 0.01;  // watts
  double rho = 30.0;
  double tau0 = 0.1;           // meters
  double eps1 = 1e-3;          // outer stopping threshold on (R^{n+1} - R^n)^2
  double eps2 = 1e-3;          // smallest position step
  double eps3 = 1e-3;          // ADMM residual tolerance, capped at 1e-4
  int max_iterations = 200;
  Scheme scheme = Scheme::kProposed;
  double exhaustive_grid_step = 1e-4;  // meters
  long exhaustive_max_points = 250000;
  int admm_max_iterations = 300;
  QuadraticWeight analog_weight = QuadraticWeight::kSurrogate;
  StepRule step_rule = StepRule::kUnitDirection;
  bool relative_stop = false;
  /// Reject a block update whose result lowers the surrogate.
  bool monotone_guard = true;
  bool record_exact = false;
  /// Called after every per-subarray position step with the subproblem, the
  /// starting point, the box and the step taken. Test hook; empty by default.
  std::function<void(const PositionSubproblem&, const Vec2&, const RegionBox&, const PositionStep&)>
      position_probe;

  void validate() const;
  [[nodiscard]] double admm_tolerance() const { return std::min(eps3, 1e-4); }
};

struct IterationDiagnostics {
  double f2_start = 0.0;
  double f2_after_digital = 0.0;
  double f2_after_analog = 0.0;
  double f2_after_position = 0.0;
  double multiplier = 0.0;
  double power_after_digital = 0.0;
  bool digital_accepted = true;
  int admm_iterations = 0;
  bool admm_converged = false;
  double admm_initial_residual = 0.0;
  double admm_final_residual = 0.0;
  bool analog_accepted = true;
  int subarrays_moved = 0;
  double max_abs_w = 0.0;
  double power = 0.0;
  double sum_rate = 0.0;
};

struct AOResult {
  std::vector<double> trace;        // sum-rate, entry 0 is the initial state
  std::vector<double> exact_trace;  // exact-channel sum-rate when requested
  std::vector<IterationDiagnostics> iterations;
  std::vector<SubarrayPositions> position_history;  // one entry per trace entry
  BeamformerState state;
  double strict_sum_rate = 0.0;  // after unit-modulus renormalisation
  double wall_ms = 0.0;
  int admm_soft_stops = 0;
};

/// t0 at the box centres, random unit-modulus analog phases, matched-filter
/// digital beamformer scaled to the full power budget.
BeamformerState init_state(const Scenario& scenario, const ArrayGeometry& geometry, const AOConfig& config,
                           std::uint64_t seed);

/// Runs the alternating optimisation on `geometry`. The position step is
/// gradient based for kProposed, grid search for kExhaustive and skipped
/// for the fixed layouts.
AOResult run_ao(const Scenario& scenario, const ArrayGeometry& geometry, const AOConfig& config,
                std::uint64_t seed);

/// Movable layout: aperture tiled into frames, one per subarray.
ArrayGeometry movable_geometry(int M, int N, double wavelength, double aperture);
/// Sparse fixed layout with reference-point pitch A / (2 sqrt(M)).
ArrayGeometry sparse_geometry(int M, int N, double wavelength, double aperture);
/// Dense fixed layout: one contiguous half-wavelength UPA split into blocks.
ArrayGeometry dense_geometry(int M, int N, double wavelength, double aperture);
ArrayGeometry geometry_for(Scheme scheme, int M, int N, double wavelength, double aperture);

AOResult run_baseline_sparse(const Scenario& scenario, const ArrayGeometry& movable, AOConfig config,
                             std::uint64_t seed);
AOResult run_baseline_dense(const Scenario& scenario, const ArrayGeometry& movable, AOConfig config,
                            std::uint64_t seed);
AOResult run_exhaustive(const Scenario& scenario, const ArrayGeometry& geometry, AOConfig config,
                        std::uint64_t seed);

/// Sum-rate after forcing every analog weight to unit modulus and scaling V
/// back inside the power budget if needed.
double strict_unit_modulus_rate(const std::vector<CVec>& channels, const BeamformerState& state,
                                const RVec& noise, double power_budget);

}  // namespace msbf
