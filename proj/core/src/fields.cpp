#include "crdm/fields.hpp"

#include <cmath>

#include "crdm/quadrature.hpp"

namespace crdm {

DensityProfile::DensityProfile(ValueFn value, GradientFn gradient, double declared_n,
                               PresetInfo info, Vec3 center, double support_half_width,
                               std::optional<Vec3> cusp)
    : value_(std::move(value)),
      gradient_(std::move(gradient)),
      declared_n_(declared_n),
      info_(std::move(info)),
      center_(std::move(center)),
      support_half_width_(support_half_width),
      cusp_(std::move(cusp)) {}

bool DensityProfile::near_cusp(const Vec3& r) const {
  return cusp_ && (r - *cusp_).norm() < kCuspExclusionRadius;
}

std::optional<Vec3> DensityProfile::gradient(const Vec3& r) const {
  if (near_cusp(r)) return std::nullopt;
  return gradient_(r);
}

GridSpec DensityProfile::default_grid(std::size_t count) const {
  return GridSpec::cube(center_, support_half_width_, count);
}

KappaField::KappaField(ValueFn value, JacobianFn jacobian, PresetInfo info)
    : value_(std::move(value)), jacobian_(std::move(jacobian)), info_(std::move(info)) {}

Vec3 KappaField::vorticity(const Vec3& r) const {
  const Mat3 j = jacobian_(r);
  // (curl k)_x = d_y k_z - d_z k_y, with J(a, b) = d_a k_b.
  return 0.5 * Vec3(j(1, 2) - j(2, 1), j(2, 0) - j(0, 2), j(0, 1) - j(1, 0));
}

KappaField operator+(const KappaField& a, const KappaField& b) {
  PresetInfo info{a.info_.name + "+" + b.info_.name, a.info_.params};
  info.params.insert(info.params.end(), b.info_.params.begin(), b.info_.params.end());
  return KappaField([a, b](const Vec3& r) -> Vec3 { return a(r) + b(r); },
                    [a, b](const Vec3& r) -> Mat3 { return a.jacobian(r) + b.jacobian(r); },
                    std::move(info));
}

DensityProfile make_gaussian_density(double n, double alpha, const Vec3& center) {
  if (!(n > 0.0)) throw ParameterError("gaussian density: N must be positive");
  if (!(alpha > 0.0)) throw ParameterError("gaussian density: alpha must be positive");
  const double prefactor = n * std::pow(alpha / kPi, 1.5);
  auto value = [=](const Vec3& r) { return prefactor * std::exp(-alpha * (r - center).squaredNorm()); };
  auto gradient = [=](const Vec3& r) -> Vec3 {
    const Vec3 d = r - center;
    return -2.0 * alpha * prefactor * std::exp(-alpha * d.squaredNorm()) * d;
  };
  PresetInfo info{"gaussian", {{"N", n}, {"alpha", alpha}}};
  return {value, gradient, n, std::move(info), center, 8.0 / std::sqrt(alpha)};
}

DensityProfile make_exponential_density(double n, double zeta, const Vec3& center) {
  if (!(n > 0.0)) throw ParameterError("exponential density: N must be positive");
  if (!(zeta > 0.0)) throw ParameterError("exponential density: zeta must be positive");
  const double prefactor = n * zeta * zeta * zeta / kPi;
  auto value = [=](const Vec3& r) { return prefactor * std::exp(-2.0 * zeta * (r - center).norm()); };
  auto gradient = [=](const Vec3& r) -> Vec3 {
    const Vec3 d = r - center;
    const double dist = d.norm();
    return (-2.0 * zeta * prefactor * std::exp(-2.0 * zeta * dist) / dist) * d;
  };
  PresetInfo info{"exponential", {{"N", n}, {"zeta", zeta}}};
  return {value, gradient, n, std::move(info), center, 12.0 / zeta, center};
}

KappaField kappa_zero() {
  return {[](const Vec3&) -> Vec3 { return Vec3::Zero(); },
          [](const Vec3&) -> Mat3 { return Mat3::Zero(); }, {"zero", {}}};
}

KappaField kappa_constant(const Vec3& value) {
  return {[value](const Vec3&) -> Vec3 { return value; },
          [](const Vec3&) -> Mat3 { return Mat3::Zero(); },
          {"constant", {{"kx", value[0]}, {"ky", value[1]}, {"kz", value[2]}}}};
}

KappaField kappa_rigid_rotation(const Vec3& omega) {
  // d_a (omega x r)_b = eps_{b c a} omega_c
  Mat3 jac = Mat3::Zero();
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = 1.0;
    jac.row(a) = omega.cross(e).transpose();
  }
  return {[omega](const Vec3& r) -> Vec3 { return omega.cross(r); },
          [jac](const Vec3&) -> Mat3 { return jac; },
          {"rigid_rotation", {{"omega_x", omega[0]}, {"omega_y", omega[1]}, {"omega_z", omega[2]}}}};
}

KappaField kappa_gauge(std::function<Vec3(const Vec3&)> chi_gradient,
                       std::function<Mat3(const Vec3&)> chi_hessian, PresetInfo info) {
  return {[g = std::move(chi_gradient)](const Vec3& r) -> Vec3 { return 2.0 * g(r); },
          [h = std::move(chi_hessian)](const Vec3& r) -> Mat3 { return 2.0 * h(r); },
          std::move(info)};
}

KappaField kappa_quadratic_gauge(const Mat3& a) {
  const Mat3 sym = 0.5 * (a + a.transpose());
  PresetInfo info{"gauge_quadratic", {}};
  const char* names[3] = {"1", "2", "3"};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      info.params.emplace_back(std::string("A") + names[i] + names[j], sym(i, j));
    }
  }
  return kappa_gauge([sym](const Vec3& r) -> Vec3 { return sym * r; },
                     [sym](const Vec3&) -> Mat3 { return sym; }, std::move(info));
}

Vec3 eval_jp(const DensityProfile& rho, const KappaField& kappa, const Vec3& r) {
  return 0.5 * rho(r) * kappa(r);
}

Vec3 vorticity_fd(const KappaField& kappa, const Vec3& r, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  Mat3 jac;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = h;
    jac.row(a) = ((kappa(r + e) - kappa(r - e)) / (2.0 * h)).transpose();
  }
  return 0.5 * Vec3(jac(1, 2) - jac(2, 1), jac(2, 0) - jac(0, 2), jac(0, 1) - jac(1, 0));
}

NormEstimate lp_norm(const DensityProfile& rho, double q, const GridSpec& grid,
                     const Execution& exec) {
  if (!(q >= 1.0)) throw ParameterError("lp_norm: q must be >= 1");
  struct Acc {
    double sum = 0.0;
    double max_all = 0.0;
    double max_boundary = 0.0;
    Acc operator+(const Acc& o) const {
      return {sum + o.sum, std::max(max_all, o.max_all), std::max(max_boundary, o.max_boundary)};
    }
  };
  const Acc acc = reduce_grid<Acc>(
      grid,
      [&](std::size_t idx, const Vec3& r, double w) {
        const double v = rho(r);
        return Acc{w * std::pow(v, q), v, grid.on_boundary(idx) ? v : 0.0};
      },
      exec);
  NormEstimate out;
  out.value = std::pow(acc.sum, 1.0 / q);
  out.boundary_ratio = acc.max_all > 0.0 ? acc.max_boundary / acc.max_all : 0.0;
  out.truncated = out.boundary_ratio > kTruncationThreshold;
  return out;
}

}  // namespace crdm
