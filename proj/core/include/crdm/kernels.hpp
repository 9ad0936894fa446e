#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crdm/fields.hpp"
#include "crdm/types.hpp"

namespace crdm {

enum class FactorKind { kG, kH };

/// Gaussian factor g_lambda or h_mu. With a density attached, weighted(u, v)
/// is G(u, v) = g(u, v) sqrt(rho(v)) (resp. H).
class KernelFactor {
 public:
  using EvalFn = std::function<Complex(const Vec3& u, const Vec3& v)>;

  KernelFactor(FactorKind kind, double width, EvalFn eval,
               std::optional<DensityProfile> rho = std::nullopt);

  Complex operator()(const Vec3& u, const Vec3& v) const { return eval_(u, v); }
  Complex weighted(const Vec3& u, const Vec3& v) const;

  FactorKind kind() const { return kind_; }
  double width() const { return width_; }
  const std::optional<DensityProfile>& density() const { return rho_; }
  KernelFactor with_density(DensityProfile rho) const;

  /// Normalisation of |g|: sqrt(8) width^{3/4} / pi^{3/4}.
  static double amplitude(double width);

 private:
  FactorKind kind_;
  double width_;
  EvalFn eval_;
  std::optional<DensityProfile> rho_;
};

/// g(u, v) = A exp(-i v.kappa(v)) exp(-2 lambda |u - v|^2).
KernelFactor factor_g(const KappaField& kappa, double lambda);
/// h(u, v) = A exp(+i u.kappa(v)) exp(-2 mu |u - v|^2).
KernelFactor factor_h(const KappaField& kappa, double mu);

/// Per-point data reused by every kernel entry touching that point.
struct NodeSample {
  Vec3 r = Vec3::Zero();
  double rho = 0.0;
  Vec3 kappa = Vec3::Zero();
  double phase = 0.0;  // r . kappa(r)
};

/// Closed-form kernel D_theta = theta P_lambda + (1 - theta) Q_mu.
/// theta = 1 is P_lambda alone and theta = 0 is Q_mu alone.
class RdmKernel {
 public:
  RdmKernel(DensityProfile rho, KappaField kappa, double lambda, double mu, double theta,
            int occ_max);

  Complex operator()(const Vec3& r, const Vec3& s) const {
    return evaluate(sample(r), sample(s));
  }
  NodeSample sample(const Vec3& r) const;
  Complex evaluate(const NodeSample& a, const NodeSample& b) const;

  Complex p_entry(const NodeSample& a, const NodeSample& b) const;
  Complex q_entry(const NodeSample& a, const NodeSample& b) const;

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  double theta() const { return theta_; }
  int occ_max() const { return occ_max_; }
  const DensityProfile& density() const { return rho_; }
  const KappaField& kappa() const { return kappa_; }
  std::string label() const;

 private:
  DensityProfile rho_;
  KappaField kappa_;
  double lambda_;
  double mu_;
  double theta_;
  int occ_max_;
};

RdmKernel kernel_P(const DensityProfile& rho, const KappaField& kappa, double lambda,
                   int occ_max = 2);
RdmKernel kernel_Q(const DensityProfile& rho, const KappaField& kappa, double mu,
                   int occ_max = 2);
RdmKernel kernel_D(const DensityProfile& rho, const KappaField& kappa, double lambda, double mu,
                   double theta = 0.5, int occ_max = 2);

using PointPair = std::pair<Vec3, Vec3>;

/// Deterministic point pairs: first point uniform in the cube of the given
/// half-width around center, second within max_separation of the first.
std::vector<PointPair> sample_point_pairs(std::size_t count, std::uint64_t seed,
                                          const Vec3& center, double half_width,
                                          double max_separation);
/// Deterministic points uniform in a cube.
std::vector<Vec3> sample_points(std::size_t count, std::uint64_t seed, const Vec3& center,
                                double half_width);

/// max over pairs of |int conj(F(u,r)) F(u,s) du - K(r,s)| / (1 + |K(r,s)|),
/// the u-integral done by Gauss-Hermite quadrature centred at (r+s)/2.
/// The factor must carry a density.
double factorization_residual(const KernelFactor& factor, const RdmKernel& kernel,
                              const std::vector<PointPair>& pairs, int gh_order);

/// Residuals over a ladder of Gauss-Hermite orders.
struct FactorizationStudy {
  std::vector<int> orders;
  std::vector<double> residuals;
  /// Each residual is <= its predecessor, or below kResidualFloor.
  bool monotone = false;
  double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};
inline constexpr double kResidualFloor = 1e-13;

FactorizationStudy factorization_study(const KernelFactor& factor, const RdmKernel& kernel,
                                       const std::vector<PointPair>& pairs,
                                       const std::vector<int>& orders);

/// Sufficient lower bound on lambda (and mu) for occupations <= occ_max.
struct Admissibility {
  double q = 0.0;
  double p = 0.0;
  double norm_q = 0.0;
  double n = 0.0;
  double lambda_min = 0.0;
  int occ_max = 2;
};

/// lambda_min = (2p/pi) (N norm_q / occ_max^2)^{2p/3}, p = q/(q-1).
Admissibility admissible_lambda(double n, double norm_q, double q, int occ_max);

void validate_occ_max(int occ_max);

}  // namespace crdm
