// SPDX-License-Identifier: Apache-2.0
//
// Array geometry, movable regions, scenario generation and channel synthesis.
//
// The array lies in the z = 0 plane with its origin at the centre of the
// aperture. Each of the M subarrays is a sqrt(N) x sqrt(N) planar grid whose
// first element is the reference point t_m; channel vectors are stored
// subarray-major (entry (m, n) at index m * N + n).

#pragma once

#include <cstdint>
#include <vector>

#include "msbf/common.hpp"

namespace msbf {

/// Axis-aligned box constraining one subarray reference point.
/// Degenerate boxes (lo == hi) pin the subarray in place.
struct RegionBox {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  [[nodiscard]] bool contains(const Vec2& t) const {
    return t.x() >= x_lo && t.x() <= x_hi && t.y() >= y_lo && t.y() <= y_hi;
  }
  [[nodiscard]] Vec2 center() const { return {0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi)}; }
  [[nodiscard]] bool degenerate() const { return x_lo == x_hi && y_lo == y_hi; }
};

struct ArrayGeometry {
  int num_subarrays = 1;           // M
  int antennas_per_subarray = 1;   // N, a perfect square
  double wavelength = 0.01;        // meters
  double intra_spacing = 0.005;    // element pitch inside a subarray
  double aperture = 0.2;           // side A of the square aperture
  std::vector<RegionBox> regions;  // one per subarray

  [[nodiscard]] int side() const;  // sqrt(N)
  [[nodiscard]] int total_elements() const { return num_subarrays * antennas_per_subarray; }
  /// Edge length of one subarray footprint, (sqrt(N) - 1) * intra_spacing.
  [[nodiscard]] double footprint() const;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Reference points of the M subarrays (z = 0 implied).
using SubarrayPositions = std::vector<Vec2>;

struct Path {
  Vec3 location;   // source (user or scatterer) position
  cplx gain;       // complex path gain
  Vec2 direction;  // direction cosines seen from the array origin
};

struct User {
  std::vector<Path> paths;  // paths[0] is line-of-sight
  double noise_power = 1e-11;
};

struct Scenario {
  std::vector<User> users;

  [[nodiscard]] int num_users() const { return static_cast<int>(users.size()); }
  [[nodiscard]] RVec noise_powers() const;
  /// Order-sensitive FNV-1a digest of every path and noise value.
  [[nodiscard]] std::uint64_t digest() const;
};

struct ScenarioConfig {
  int num_users = 16;
  int num_paths = 6;
  double min_distance = 5.0;
  double max_distance = 30.0;
  double max_off_boresight_deg = 60.0;
  double nlos_relative_amplitude = 0.31622776601683794;  // 10 dB below LoS
  double noise_power = 1e-11;
};

/// Offsets of the N elements from the reference point, row-major with x
/// varying fastest.
std::vector<Vec2> element_offsets(const ArrayGeometry& geometry);

/// exp(-j 2pi/lambda * ||(t, 0) - r||).
cplx inter_subarray_phase(const Vec2& t, const Vec3& r, double wavelength);

/// Direction cosines (u_x, u_y) of the wave travelling from the source `r`
/// to the array origin, i.e. of (o - r). With this orientation the planar
/// phase exp(-j k offset.u) is the first-order expansion of the spherical
/// phase exp(-j k ||t + offset - r||) around the reference point.
Vec2 direction_cosines(const Vec3& r);

/// Planar-wave response of one subarray towards direction cosines `u`.
CVec far_field_response(const ArrayGeometry& geometry, const Vec2& u);

/// Hybrid planar-spherical channel: spherical phase between subarray
/// reference points, planar phase inside each subarray.
std::vector<CVec> hybrid_channel(const Scenario& scenario, const ArrayGeometry& geometry,
                                 const SubarrayPositions& positions);

/// Exact spherical-wave channel with per-element distances.
std::vector<CVec> exact_channel(const Scenario& scenario, const ArrayGeometry& geometry,
                                const SubarrayPositions& positions);

/// Deterministic random users and scatterers for one trial.
Scenario build_scenario(const ScenarioConfig& config, double wavelength, std::uint64_t seed);

/// Tiles the aperture into a sqrt(M) x sqrt(M) grid of frames and shrinks
/// each frame by the subarray footprint so subarrays never overlap.
std::vector<RegionBox> tile_regions(int num_subarrays, int antennas_per_subarray,
                                    double intra_spacing, double aperture);

/// Builds a geometry for the standard movable layout.
ArrayGeometry make_geometry(int num_subarrays, int antennas_per_subarray, double wavelength,
                            double aperture);

/// Fixed sqrt(M) x sqrt(M) layout of reference points, centred on the
/// origin, with the given pitch between reference points.
SubarrayPositions grid_layout(int num_subarrays, int antennas_per_subarray,
                              double intra_spacing, double pitch);

/// Degenerate boxes pinning each subarray at `positions`.
std::vector<RegionBox> pinned_regions(const SubarrayPositions& positions);

/// Throws GeometryError if any path source is within 1e-6 m of a reference
/// point the subarrays could occupy (checked against every region box).
void check_clearance(const Scenario& scenario, const ArrayGeometry& geometry);

}  // namespace msbf
