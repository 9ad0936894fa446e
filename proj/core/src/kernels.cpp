#include "crdm/kernels.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "crdm/quadrature.hpp"

namespace crdm {

void validate_occ_max(int occ_max) {
  if (occ_max != 1 && occ_max != 2) throw ParameterError("occ_max must be 1 or 2");
}

KernelFactor::KernelFactor(FactorKind kind, double width, EvalFn eval,
                           std::optional<DensityProfile> rho)
    : kind_(kind), width_(width), eval_(std::move(eval)), rho_(std::move(rho)) {
  if (!(width_ > 0.0)) throw ParameterError("kernel factor width must be positive");
}

double KernelFactor::amplitude(double width) {
  return std::sqrt(8.0) * std::pow(width / kPi, 0.75);
}

Complex KernelFactor::weighted(const Vec3& u, const Vec3& v) const {
  if (!rho_) throw ParameterError("kernel factor has no density attached");
  return eval_(u, v) * std::sqrt((*rho_)(v));
}

KernelFactor KernelFactor::with_density(DensityProfile rho) const {
  return KernelFactor(kind_, width_, eval_, std::move(rho));
}

KernelFactor factor_g(const KappaField& kappa, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("factor_g: lambda must be positive");
  const double amp = KernelFactor::amplitude(lambda);
  return KernelFactor(FactorKind::kG, lambda, [=](const Vec3& u, const Vec3& v) {
    return std::polar(amp * std::exp(-2.0 * lambda * (u - v).squaredNorm()), -v.dot(kappa(v)));
  });
}

KernelFactor factor_h(const KappaField& kappa, double mu) {
  if (!(mu > 0.0)) throw ParameterError("factor_h: mu must be positive");
  const double amp = KernelFactor::amplitude(mu);
  return KernelFactor(FactorKind::kH, mu, [=](const Vec3& u, const Vec3& v) {
    return std::polar(amp * std::exp(-2.0 * mu * (u - v).squaredNorm()), u.dot(kappa(v)));
  });
}

RdmKernel::RdmKernel(DensityProfile rho, KappaField kappa, double lambda, double mu,
                     double theta, int occ_max)
    : rho_(std::move(rho)),
      kappa_(std::move(kappa)),
      lambda_(lambda),
      mu_(mu),
      theta_(theta),
      occ_max_(occ_max) {
  if (!(theta_ >= 0.0 && theta_ <= 1.0)) throw ParameterError("theta must lie in [0, 1]");
  if (theta_ > 0.0 && !(lambda_ > 0.0)) throw ParameterError("lambda must be positive");
  if (theta_ < 1.0 && !(mu_ > 0.0)) throw ParameterError("mu must be positive");
  validate_occ_max(occ_max_);
}

NodeSample RdmKernel::sample(const Vec3& r) const {
  NodeSample s;
  s.r = r;
  s.rho = rho_(r);
  s.kappa = kappa_(r);
  s.phase = r.dot(s.kappa);
  return s;
}

Complex RdmKernel::p_entry(const NodeSample& a, const NodeSample& b) const {
  const double mag = std::sqrt(a.rho * b.rho) * std::exp(-lambda_ * (a.r - b.r).squaredNorm());
  return std::polar(mag, a.phase - b.phase);
}

Complex RdmKernel::q_entry(const NodeSample& a, const NodeSample& b) const {
  const Vec3 dk = a.kappa - b.kappa;
  const double mag = std::sqrt(a.rho * b.rho) *
                     std::exp(-mu_ * (a.r - b.r).squaredNorm() - dk.squaredNorm() / (16.0 * mu_));
  return std::polar(mag, -0.5 * (a.r + b.r).dot(dk));
}

Complex RdmKernel::evaluate(const NodeSample& a, const NodeSample& b) const {
  if (theta_ == 1.0) return p_entry(a, b);
  if (theta_ == 0.0) return q_entry(a, b);
  return theta_ * p_entry(a, b) + (1.0 - theta_) * q_entry(a, b);
}

std::string RdmKernel::label() const {
  std::ostringstream os;
  if (theta_ == 1.0) {
    os << "P(lambda=" << lambda_ << ")";
  } else if (theta_ == 0.0) {
    os << "Q(mu=" << mu_ << ")";
  } else {
    os << "D(lambda=" << lambda_ << ",mu=" << mu_ << ",theta=" << theta_ << ")";
  }
  os << '[' << rho_.info().name << ',' << kappa_.info().name << ",occ_max=" << occ_max_ << ']';
  return os.str();
}

RdmKernel kernel_P(const DensityProfile& rho, const KappaField& kappa, double lambda,
                   int occ_max) {
  if (!(lambda > 0.0)) throw ParameterError("kernel_P: lambda must be positive");
  return {rho, kappa, lambda, lambda, 1.0, occ_max};
}

RdmKernel kernel_Q(const DensityProfile& rho, const KappaField& kappa, double mu,
                   int occ_max) {
  if (!(mu > 0.0)) throw ParameterError("kernel_Q: mu must be positive");
  return {rho, kappa, mu, mu, 0.0, occ_max};
}

RdmKernel kernel_D(const DensityProfile& rho, const KappaField& kappa, double lambda, double mu,
                   double theta, int occ_max) {
  return {rho, kappa, lambda, mu, theta, occ_max};
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; avoids the
// implementation-defined distributions of <random>.
double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Vec3 uniform_in_cube(std::mt19937_64& gen, const Vec3& center, double half_width) {
  Vec3 p;
  for (int a = 0; a < 3; ++a) p[a] = center[a] + half_width * (2.0 * unit_uniform(gen) - 1.0);
  return p;
}

}  // namespace

std::vector<Vec3> sample_points(std::size_t count, std::uint64_t seed, const Vec3& center,
                                double half_width) {
  std::mt19937_64 gen(seed);
  std::vector<Vec3> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(uniform_in_cube(gen, center, half_width));
  return out;
}

std::vector<PointPair> sample_point_pairs(std::size_t count, std::uint64_t seed,
                                          const Vec3& center, double half_width,
                                          double max_separation) {
  std::mt19937_64 gen(seed);
  std::vector<PointPair> out;
  out.reserve(count);
  while (out.size() < count) {
    const Vec3 r = uniform_in_cube(gen, center, half_width);
    const Vec3 offset = uniform_in_cube(gen, Vec3::Zero(), max_separation);
    if (offset.norm() > max_separation) continue;  // rejection into the ball
    out.emplace_back(r, r + offset);
  }
  return out;
}

namespace {

Complex factorized_entry(const KernelFactor& factor, const Vec3& r, const Vec3& s,
                         const GaussHermiteRule& rule) {
  const Vec3 mid = 0.5 * (r + s);
  const double scale = 4.0 * factor.width();
  auto phi = [&](const Vec3& u) {
    return std::conj(factor.weighted(u, r)) * factor.weighted(u, s) *
           std::exp(scale * (u - mid).squaredNorm());
  };
  return gauss_hermite_integral(phi, mid, scale, rule);
}

}  // namespace

double factorization_residual(const KernelFactor& factor, const RdmKernel& kernel,
                              const std::vector<PointPair>& pairs, int gh_order) {
  if (gh_order < 8) throw ParameterError("factorization_residual: gh_order must be >= 8");
  if (gh_order > 64) throw ParameterError("factorization_residual: gh_order must be <= 64");
  if (!factor.density()) throw ParameterError("factorization_residual: factor needs a density");
  const auto rule = GaussHermiteRule::make(gh_order);
  double worst = 0.0;
  for (const auto& [r, s] : pairs) {
    const Complex numeric = factorized_entry(factor, r, s, rule);
    const Complex closed = kernel(r, s);
    worst = std::max(worst, std::abs(numeric - closed) / (1.0 + std::abs(closed)));
  }
  return worst;
}

FactorizationStudy factorization_study(const KernelFactor& factor, const RdmKernel& kernel,
                                       const std::vector<PointPair>& pairs,
                                       const std::vector<int>& orders) {
  FactorizationStudy study;
  study.orders = orders;
  study.monotone = true;
  for (int order : orders) {
    const double res = factorization_residual(factor, kernel, pairs, order);
    if (!study.residuals.empty() && res > study.residuals.back() && res > kResidualFloor) {
      study.monotone = false;
    }
    study.residuals.push_back(res);
  }
  return study;
}

Admissibility admissible_lambda(double n, double norm_q, double q, int occ_max) {
  if (!(q > 1.0)) throw ParameterError("admissible_lambda: q must exceed 1");
  if (!(n > 0.0)) throw ParameterError("admissible_lambda: N must be positive");
  if (!(norm_q > 0.0)) throw ParameterError("admissible_lambda: norm_q must be positive");
  validate_occ_max(occ_max);
  Admissibility a;
  a.q = q;
  a.p = q / (q - 1.0);
  a.norm_q = norm_q;
  a.n = n;
  a.occ_max = occ_max;
  const double occ2 = static_cast<double>(occ_max * occ_max);
  a.lambda_min = (2.0 * a.p / kPi) * std::pow(n * norm_q / occ2, 2.0 * a.p / 3.0);
  return a;
}

}  // namespace crdm
