// SPDX-License-Identifier: Apache-2.0
//
// Shared numeric types and the error hierarchy used across the core library.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace msbf {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Base class for every error raised by the core. The C API maps the
/// concrete subclass onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or malformed input data.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Geometry that cannot be evaluated (e.g. a source sitting on an antenna).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to produce a usable answer.
class SolverError : public Error {
 public:
  using Error::Error;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace msbf
