#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crdm/grid.hpp"
#include "crdm/types.hpp"

namespace crdm {

/// Name and numeric parameters of the preset a field was built from.
struct PresetInfo {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
};

/// Radius of the ball around a density cusp that is excluded from integrals
/// and where gradients are reported as undefined.
inline constexpr double kCuspExclusionRadius = 1e-6;

/// Prescribed density rho(r) >= 0 with its analytic gradient.
class DensityProfile {
 public:
  using ValueFn = std::function<double(const Vec3&)>;
  using GradientFn = std::function<Vec3(const Vec3&)>;

  DensityProfile(ValueFn value, GradientFn gradient, double declared_n, PresetInfo info,
                 Vec3 center, double support_half_width, std::optional<Vec3> cusp = std::nullopt);

  double operator()(const Vec3& r) const { return value_(r); }
  /// Empty inside the exclusion ball of a cusp.
  std::optional<Vec3> gradient(const Vec3& r) const;
  bool near_cusp(const Vec3& r) const;

  double declared_n() const { return declared_n_; }
  const PresetInfo& info() const { return info_; }
  const Vec3& center() const { return center_; }
  const std::optional<Vec3>& cusp() const { return cusp_; }
  /// Half-width of the cube around center() outside which the density tail
  /// is negligible (below ~1e-12 of N).
  double support_half_width() const { return support_half_width_; }
  /// Trapezoid cube over the support. Even counts keep a centered cusp off the
  /// node set.
  GridSpec default_grid(std::size_t count = 48) const;

 private:
  ValueFn value_;
  GradientFn gradient_;
  double declared_n_;
  PresetInfo info_;
  Vec3 center_;
  double support_half_width_;
  std::optional<Vec3> cusp_;
};

/// Current factor kappa with j_p = rho * kappa / 2.
class KappaField {
 public:
  using ValueFn = std::function<Vec3(const Vec3&)>;
  using JacobianFn = std::function<Mat3(const Vec3&)>;

  KappaField(ValueFn value, JacobianFn jacobian, PresetInfo info);

  Vec3 operator()(const Vec3& r) const { return value_(r); }
  /// J(a, b) = d kappa_b / d r_a.
  Mat3 jacobian(const Vec3& r) const { return jacobian_(r); }
  /// nu = curl(kappa) / 2 from the analytic Jacobian.
  Vec3 vorticity(const Vec3& r) const;
  const PresetInfo& info() const { return info_; }

  friend KappaField operator+(const KappaField& a, const KappaField& b);

 private:
  ValueFn value_;
  JacobianFn jacobian_;
  PresetInfo info_;
};

DensityProfile make_gaussian_density(double n, double alpha, const Vec3& center = Vec3::Zero());
DensityProfile make_exponential_density(double n, double zeta,
                                        const Vec3& center = Vec3::Zero());

KappaField kappa_zero();
KappaField kappa_constant(const Vec3& value);
/// kappa(r) = omega x r.
KappaField kappa_rigid_rotation(const Vec3& omega);
/// kappa = 2 grad(chi). The caller supplies grad(chi) and its Hessian.
KappaField kappa_gauge(std::function<Vec3(const Vec3&)> chi_gradient,
                       std::function<Mat3(const Vec3&)> chi_hessian,
                       PresetInfo info = {"gauge", {}});
/// chi(r) = r^T A r / 2 with A symmetrized.
KappaField kappa_quadratic_gauge(const Mat3& a);

Vec3 eval_jp(const DensityProfile& rho, const KappaField& kappa, const Vec3& r);

/// Central-difference vorticity curl(kappa)/2, independent of the analytic
/// Jacobian.
Vec3 vorticity_fd(const KappaField& kappa, const Vec3& r, double h);

struct NormEstimate {
  double value = 0.0;
  /// Largest density on the grid boundary relative to the largest sampled one.
  double boundary_ratio = 0.0;
  /// Set when boundary_ratio exceeds kTruncationThreshold.
  bool truncated = false;
};
inline constexpr double kTruncationThreshold = 1e-10;

/// (sum_i w_i rho(r_i)^q)^(1/q).
NormEstimate lp_norm(const DensityProfile& rho, double q, const GridSpec& grid,
                     const Execution& exec = {});

}  // namespace crdm
