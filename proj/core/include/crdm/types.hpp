#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crdm {

using Vec3 = Eigen::Vector3d;
/// Jacobian layout: J(a, b) = d kappa_b / d r_a.
using Mat3 = Eigen::Matrix3d;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Invalid construction or call parameter (non-positive width, theta outside
/// [0,1], conjugate exponent undefined, ...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Number of worker threads used for node-parallel loops. Results never depend
/// on this value.
struct Execution {
  unsigned workers = 1;
};

}  // namespace crdm
