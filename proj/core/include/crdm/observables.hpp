#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crdm/fields.hpp"
#include "crdm/grid.hpp"
#include "crdm/kernels.hpp"
#include "crdm/types.hpp"

namespace crdm {

/// Densities below this value do not enter |grad rho|^2 / rho terms.
inline constexpr double kDensityFloor = 1e-30;
inline constexpr double kDefaultFdStep = 1e-3;

/// K(r, r), which is real for every Hermitian kernel.
double diag_density(const RdmKernel& kernel, const Vec3& r);

struct CurrentEstimate {
  Vec3 value = Vec3::Zero();   // Richardson-extrapolated
  Vec3 coarse = Vec3::Zero();  // plain central difference at step h
  bool smooth = true;          // h and h/2 estimates agree
};

/// Re{-i d/dr_a K(r, s)} at s = r by central differences in r at steps h and
/// h/2, Richardson-combined.
CurrentEstimate extract_current_fd(const RdmKernel& kernel, const Vec3& r,
                                   double h = kDefaultFdStep, double smooth_tol = 1e-4);

/// rho (kappa_a + r . d_a kappa) = 2 j_p + rho r . d_a kappa.
Vec3 current_P_analytic(const DensityProfile& rho, const KappaField& kappa, const Vec3& r);
/// -rho r . d_a kappa.
Vec3 current_Q_analytic(const DensityProfile& rho, const KappaField& kappa, const Vec3& r);

struct CurrentComparison {
  double abs_l2 = 0.0;
  double rel_l2 = 0.0;
  std::size_t rough_nodes = 0;     // Richardson disagreement
  std::size_t excluded_nodes = 0;  // inside a cusp exclusion ball
};

/// Grid-L2 distance between the FD current of `kernel` and `target`.
CurrentComparison compare_current_fd(const RdmKernel& kernel,
                                     const std::function<Vec3(const Vec3&)>& target,
                                     const GridSpec& grid, double h = kDefaultFdStep,
                                     const Execution& exec = {});

struct TauSample {
  double value = 0.0;
  bool singular = false;  // gradient undefined, or rho = 0 with grad rho != 0
  bool floored = false;   // rho below kDensityFloor; vW term dropped
};

/// Kinetic-energy densities tau = (1/2) div_r . div_s K at s = r.
///   tau_P = |grad rho|^2/(8 rho) + |grad(r.kappa)|^2 rho / 2 + 3 lambda rho
///   tau_Q = |grad rho|^2/(8 rho)
///           + (sum_a (r . d_a kappa)^2 + sum_ab (d_a kappa_b)^2 / (8 mu)) rho / 2
///           + 3 mu rho
/// The Gaussian width contributes (1/2) * 2 lambda per Cartesian direction.
TauSample tau_P(const DensityProfile& rho, const KappaField& kappa, double lambda, const Vec3& r);
TauSample tau_Q(const DensityProfile& rho, const KappaField& kappa, double mu, const Vec3& r);
TauSample tau_D(const DensityProfile& rho, const KappaField& kappa, double lambda, double mu,
                const Vec3& r, double theta = 0.5);

struct TauFdEstimate {
  double value = 0.0;
  double coarse = 0.0;
  bool smooth = true;
};

/// (1/2) sum_a d^2 K / dr_a ds_a at s = r by a four-point mixed stencil,
/// Richardson-combined over h and h/2.
TauFdEstimate tau_fd(const RdmKernel& kernel, const Vec3& r, double h = kDefaultFdStep,
                     double smooth_tol = 1e-4);

struct FunctionalValue {
  double value = 0.0;
  std::size_t floored_nodes = 0;
  std::size_t excluded_nodes = 0;
};

/// int |grad rho|^2 / (8 rho).
FunctionalValue functional_T_W(const DensityProfile& rho, const GridSpec& grid,
                               const Execution& exec = {});
/// int |j_p|^2 / (2 rho) = (1/8) int rho kappa^2.
FunctionalValue functional_T_p(const DensityProfile& rho, const KappaField& kappa,
                               const GridSpec& grid, const Execution& exec = {});

struct TabValue {
  Mat3 components = Mat3::Zero();  // (a, b) -> int (1 + r^2) rho (d_a kappa_b)^2
  double sum = 0.0;
  std::size_t excluded_nodes = 0;
};
TabValue functional_T_ab(const DensityProfile& rho, const KappaField& kappa, const GridSpec& grid,
                         const Execution& exec = {});

/// int (1 + r^2) rho |nu|^2, nu = curl(kappa) / 2.
FunctionalValue vorticity_moment(const DensityProfile& rho, const KappaField& kappa,
                                 const GridSpec& grid, const Execution& exec = {});

/// int tau_theta from the closed form.
FunctionalValue tau_integral(const DensityProfile& rho, const KappaField& kappa, double lambda,
                             double mu, double theta, const GridSpec& grid,
                             const Execution& exec = {});
/// int tau from mixed finite differences of the kernel.
FunctionalValue tau_integral_fd(const RdmKernel& kernel, const GridSpec& grid,
                                double h = kDefaultFdStep, const Execution& exec = {});

/// Moments of the squared Jacobian that enter the upper bounds.
struct JacobianMoments {
  double plain = 0.0;      // int rho sum_ab (d_a kappa_b)^2
  double r_squared = 0.0;  // int rho r^2 sum_ab (d_a kappa_b)^2
};
JacobianMoments jacobian_moments(const DensityProfile& rho, const KappaField& kappa,
                                 const GridSpec& grid, const Execution& exec = {});

struct BoundInputs {
  double t_w = 0.0;
  double t_p = 0.0;
  double n = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  JacobianMoments moments;
};

/// Upper bound on the canonical kinetic energy of D in its published form:
/// T_W + 4 T_p + (lambda+mu) N / 2 + int rho (3 r^2/4 + 1/(32 mu)) sum (d kappa)^2.
double representability_bound(const BoundInputs& in);
/// Same bound with the width term 3 (lambda+mu) N / 2 that the kinetic-energy
/// density actually carries. This one holds for kappa = 0.
double representability_bound_corrected(const BoundInputs& in);

struct Sandwich {
  double lower = 0.0;  // T_W + T_p
  double upper = 0.0;  // T_W + 4 T_p + (lambda+mu) N + int rho (3 r^2/2 + 1/(16 mu)) sum (d kappa)^2
};
Sandwich sandwich(const BoundInputs& in);

struct FunctionalInputs {
  std::vector<double> qs{2.0};
  double lambda = 0.0;
  double mu = 0.0;
  double theta = 0.5;
  int occ_max = 2;
  double fd_step = kDefaultFdStep;
  bool include_fd_tau = true;
};

/// All scalar functionals and bounds for one (rho, kappa) instance.
struct FunctionalReport {
  double n = 0.0;
  double n_quadrature = 0.0;
  std::map<double, NormEstimate> norm_q;
  std::map<double, Admissibility> admissibility;
  double t_w = 0.0;
  double t_p = 0.0;
  TabValue t_ab;
  double vorticity_moment = 0.0;
  double tau_analytic = 0.0;
  std::optional<double> tau_fd;
  JacobianMoments moments;
  double bound_representability = 0.0;
  double bound_representability_corrected = 0.0;
  Sandwich sandwich;
  double lambda = 0.0;
  double mu = 0.0;
  double theta = 0.5;
  int occ_max = 2;
  std::string grid;
  std::size_t floored_nodes = 0;
  std::size_t excluded_nodes = 0;
};

FunctionalReport compute_functional_report(const DensityProfile& rho, const KappaField& kappa,
                                           const FunctionalInputs& inputs, const GridSpec& grid,
                                           const Execution& exec = {});

}  // namespace crdm
