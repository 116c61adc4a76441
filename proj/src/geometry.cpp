// SPDX-License-Identifier: Apache-2.0

#include "msbf/geometry.hpp"

#include <cmath>
#include <cstring>
#include <random>

namespace msbf {

namespace {

int exact_sqrt(int value) {
  const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(value))));
  return root * root == value ? root : -1;
}

constexpr double kMinClearance = 1e-6;

}  // namespace

int ArrayGeometry::side() const { return exact_sqrt(antennas_per_subarray); }

double ArrayGeometry::footprint() const { return (side() - 1) * intra_spacing; }

void ArrayGeometry::validate() const {
  if (num_subarrays < 1) throw ConfigError("geometry: num_subarrays must be >= 1");
  if (antennas_per_subarray < 1 || side() < 0)
    throw ConfigError("geometry: antennas_per_subarray must be a positive perfect square");
  if (!(wavelength > 0.0)) throw ConfigError("geometry: wavelength must be positive");
  if (!(intra_spacing > 0.0)) throw ConfigError("geometry: intra_spacing must be positive");
  if (!(aperture > 0.0)) throw ConfigError("geometry: aperture must be positive");
  if (static_cast<int>(regions.size()) != num_subarrays)
    throw ConfigError("geometry: expected one region box per subarray");
  for (const auto& box : regions) {
    if (box.x_lo > box.x_hi || box.y_lo > box.y_hi)
      throw ConfigError("geometry: region box has inverted bounds");
  }
}

RVec Scenario::noise_powers() const {
  RVec out(num_users());
  for (int k = 0; k < num_users(); ++k) out[k] = users[k].noise_power;
  return out;
}

std::uint64_t Scenario::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& user : users) {
    mix(user.noise_power);
    for (const auto& p : user.paths) {
      mix(p.location.x());
      mix(p.location.y());
      mix(p.location.z());
      mix(p.gain.real());
      mix(p.gain.imag());
    }
  }
  return h;
}

std::vector<Vec2> element_offsets(const ArrayGeometry& geometry) {
  const int side = geometry.side();
  std::vector<Vec2> out;
  out.reserve(geometry.antennas_per_subarray);
  for (int row = 0; row < side; ++row)
    for (int col = 0; col < side; ++col)
      out.emplace_back(col * geometry.intra_spacing, row * geometry.intra_spacing);
  return out;
}

cplx inter_subarray_phase(const Vec2& t, const Vec3& r, double wavelength) {
  const double dist = (Vec3(t.x(), t.y(), 0.0) - r).norm();
  if (dist < kMinClearance) throw GeometryError("source coincides with a subarray reference point");
  return std::polar(1.0, -2.0 * kPi / wavelength * dist);
}

Vec2 direction_cosines(const Vec3& r) {
  const double dist = r.norm();
  if (dist < kMinClearance) throw GeometryError("source coincides with the array origin");
  return {-r.x() / dist, -r.y() / dist};
}

CVec far_field_response(const ArrayGeometry& geometry, const Vec2& u) {
  const auto offsets = element_offsets(geometry);
  CVec a(offsets.size());
  const double k0 = 2.0 * kPi / geometry.wavelength;
  for (std::size_t n = 0; n < offsets.size(); ++n)
    a[static_cast<Eigen::Index>(n)] = std::polar(1.0, -k0 * offsets[n].dot(u));
  return a;
}

std::vector<CVec> hybrid_channel(const Scenario& scenario, const ArrayGeometry& geometry,
                                 const SubarrayPositions& positions) {
  const int M = geometry.num_subarrays;
  const int N = geometry.antennas_per_subarray;
  if (static_cast<int>(positions.size()) != M)
    throw ConfigError("hybrid_channel: positions size does not match num_subarrays");

  std::vector<CVec> out;
  out.reserve(scenario.users.size());
  for (const auto& user : scenario.users) {
    CVec h = CVec::Zero(M * N);
    for (const auto& path : user.paths) {
      const CVec a = far_field_response(geometry, path.direction);
      for (int m = 0; m < M; ++m) {
        const cplx b = inter_subarray_phase(positions[m], path.location, geometry.wavelength);
        h.segment(m * N, N) += path.gain * b * a;
      }
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<CVec> exact_channel(const Scenario& scenario, const ArrayGeometry& geometry,
                                const SubarrayPositions& positions) {
  const int M = geometry.num_subarrays;
  const int N = geometry.antennas_per_subarray;
  if (static_cast<int>(positions.size()) != M)
    throw ConfigError("exact_channel: positions size does not match num_subarrays");
  const auto offsets = element_offsets(geometry);

  std::vector<CVec> out;
  out.reserve(scenario.users.size());
  for (const auto& user : scenario.users) {
    CVec h = CVec::Zero(M * N);
    for (const auto& path : user.paths) {
      for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
          h[m * N + n] += path.gain * inter_subarray_phase(positions[m] + offsets[n],
                                                           path.location, geometry.wavelength);
    }
    out.push_back(std::move(h));
  }
  return out;
}

Scenario build_scenario(const ScenarioConfig& config, double wavelength, std::uint64_t seed) {
  if (config.num_users < 1) throw ConfigError("scenario: num_users must be >= 1");
  if (config.num_paths < 1) throw ConfigError("scenario: num_paths must be >= 1");
  if (!(config.min_distance > 0.0) || config.max_distance < config.min_distance)
    throw ConfigError("scenario: invalid distance range");
  if (!(config.noise_power > 0.0)) throw ConfigError("scenario: noise_power must be positive");
  if (!(wavelength > 0.0)) throw ConfigError("scenario: wavelength must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double max_theta = config.max_off_boresight_deg * kPi / 180.0;

  auto draw_location = [&]() {
    const double dist = config.min_distance + (config.max_distance - config.min_distance) * unit(rng);
    const double theta = max_theta * unit(rng);
    const double psi = 2.0 * kPi * unit(rng);
    return Vec3(dist * std::sin(theta) * std::cos(psi), dist * std::sin(theta) * std::sin(psi),
                dist * std::cos(theta));
  };
  auto free_space = [&](const Vec3& r) { return wavelength / (4.0 * kPi * r.norm()); };

  Scenario scenario;
  scenario.users.resize(config.num_users);
  for (auto& user : scenario.users) {
    user.noise_power = config.noise_power;
    user.paths.reserve(config.num_paths);
    for (int i = 0; i < config.num_paths; ++i) {
      Path path;
      path.location = draw_location();
      path.direction = direction_cosines(path.location);
      if (i == 0) {
        path.gain = std::polar(free_space(path.location), 2.0 * kPi * unit(rng));
      } else {
        const cplx g(normal(rng), normal(rng));
        path.gain = config.nlos_relative_amplitude * free_space(path.location) * g;
      }
      user.paths.push_back(path);
    }
  }
  return scenario;
}

std::vector<RegionBox> tile_regions(int num_subarrays, int antennas_per_subarray,
                                    double intra_spacing, double aperture) {
  const int grid = exact_sqrt(num_subarrays);
  const int side = exact_sqrt(antennas_per_subarray);
  if (grid < 1) throw ConfigError("regions: num_subarrays must be a perfect square to tile the aperture");
  if (side < 1) throw ConfigError("regions: antennas_per_subarray must be a perfect square");
  const double cell = aperture / grid;
  const double footprint = (side - 1) * intra_spacing;
  const double width = cell - footprint;
  if (width < -1e-12)
    throw ConfigError("regions: aperture too small to hold the subarray footprint in each frame");

  std::vector<RegionBox> out;
  out.reserve(num_subarrays);
  for (int row = 0; row < grid; ++row) {
    for (int col = 0; col < grid; ++col) {
      RegionBox box;
      box.x_lo = -0.5 * aperture + col * cell;
      box.y_lo = -0.5 * aperture + row * cell;
      box.x_hi = box.x_lo + std::max(width, 0.0);
      box.y_hi = box.y_lo + std::max(width, 0.0);
      out.push_back(box);
    }
  }
  return out;
}

ArrayGeometry make_geometry(int num_subarrays, int antennas_per_subarray, double wavelength,
                            double aperture) {
  ArrayGeometry g;
  g.num_subarrays = num_subarrays;
  g.antennas_per_subarray = antennas_per_subarray;
  g.wavelength = wavelength;
  g.intra_spacing = 0.5 * wavelength;
  g.aperture = aperture;
  g.regions = tile_regions(num_subarrays, antennas_per_subarray, g.intra_spacing, aperture);
  g.validate();
  return g;
}

SubarrayPositions grid_layout(int num_subarrays, int antennas_per_subarray, double intra_spacing,
                              double pitch) {
  const int grid = exact_sqrt(num_subarrays);
  const int side = exact_sqrt(antennas_per_subarray);
  if (grid < 1 || side < 1) throw ConfigError("layout: M and N must be perfect squares");
  // Centre the whole footprint (reference grid plus element extent) on the origin.
  const double extent = (grid - 1) * pitch + (side - 1) * intra_spacing;
  SubarrayPositions out;
  out.reserve(num_subarrays);
  for (int row = 0; row < grid; ++row)
    for (int col = 0; col < grid; ++col)
      out.emplace_back(-0.5 * extent + col * pitch, -0.5 * extent + row * pitch);
  return out;
}

std::vector<RegionBox> pinned_regions(const SubarrayPositions& positions) {
  std::vector<RegionBox> out;
  out.reserve(positions.size());
  for (const auto& t : positions) out.push_back({t.x(), t.x(), t.y(), t.y()});
  return out;
}

void check_clearance(const Scenario& scenario, const ArrayGeometry& geometry) {
  for (const auto& user : scenario.users) {
    for (const auto& path : user.paths) {
      if (path.location.z() <= 0.0) throw GeometryError("scenario: path source behind the array plane");
      for (const auto& box : geometry.regions) {
        const double dx = std::max({box.x_lo - path.location.x(), 0.0, path.location.x() - box.x_hi});
        const double dy = std::max({box.y_lo - path.location.y(), 0.0, path.location.y() - box.y_hi});
        if (std::sqrt(dx * dx + dy * dy + path.location.z() * path.location.z()) < kMinClearance)
          throw GeometryError("scenario: path source within 1e-6 m of a movable region");
      }
    }
  }
}

}  // namespace msbf
