#include "crdm/measure.hpp"

#include <cmath>
#include <vector>

#include "crdm/quadrature.hpp"

namespace crdm {

namespace {

template <class T, class F>
T midpoint_average(const F& f, std::span<const double> x, double eps, int subdivisions) {
  if (!(eps > 0.0)) throw ParameterError("local_average: eps must be positive");
  if (subdivisions < 1) throw ParameterError("local_average: subdivisions must be >= 1");
  const std::size_t n = x.size();
  if (n == 0) throw ParameterError("local_average: empty point");
  const double cell = 2.0 * eps / subdivisions;
  std::size_t total = 1;
  for (std::size_t d = 0; d < n; ++d) total *= static_cast<std::size_t>(subdivisions);

  std::vector<T> values(total);
  std::vector<double> point(n);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (std::size_t d = n; d-- > 0;) {
      const auto i = rest % static_cast<std::size_t>(subdivisions);
      rest /= static_cast<std::size_t>(subdivisions);
      point[d] = x[d] - eps + (static_cast<double>(i) + 0.5) * cell;
    }
    values[k] = f(std::span<const double>(point));
  }
  return pairwise_sum(std::span<const T>(values)) / static_cast<double>(total);
}

}  // namespace

Complex local_average(const PointFunction& f, std::span<const double> x, double eps,
                      int subdivisions) {
  return midpoint_average<Complex>(f, x, eps, subdivisions);
}

double local_average(const RealPointFunction& f, std::span<const double> x, double eps,
                     int subdivisions) {
  return midpoint_average<double>(f, x, eps, subdivisions);
}

double maximal_function(const PointFunction& f, std::span<const double> x,
                        std::span<const double> eps_set, int subdivisions) {
  if (eps_set.empty()) throw ParameterError("maximal_function: empty eps set");
  const RealPointFunction modulus = [&f](std::span<const double> y) { return std::abs(f(y)); };
  double best = 0.0;
  for (double eps : eps_set) best = std::max(best, local_average(modulus, x, eps, subdivisions));
  return best;
}

double averaging_sup_constant(int dimension, double eps, double p) {
  if (!(p > 1.0)) throw ParameterError("averaging_sup_constant: p must exceed 1");
  const double q = p / (p - 1.0);
  return std::pow(2.0 * eps, dimension * (1.0 / q - 1.0));
}

std::vector<double> default_epsilons() {
  std::vector<double> eps;
  for (int k = 0; k <= 8; ++k) eps.push_back(std::ldexp(1.0, -k));
  return eps;
}

Factorization factorization_of(const KernelFactor& factor, int gh_order) {
  if (!factor.density()) throw ParameterError("factorization_of: factor needs a density");
  Factorization f;
  f.left = [factor](const Vec3& x, const Vec3& y) { return std::conj(factor.weighted(y, x)); };
  f.right = [factor](const Vec3& y, const Vec3& x) { return factor.weighted(y, x); };
  const double scale = 4.0 * factor.width();
  f.envelope = [scale](const Vec3& x, const Vec3& xp) {
    return std::make_pair(Vec3(0.5 * (x + xp)), scale);
  };
  f.gh_order = gh_order;
  return f;
}

Complex factorized_entry(const Factorization& f, const Vec3& x, const Vec3& x_prime) {
  // Rules are cheap but not free; cache the last one per thread.
  thread_local GaussHermiteRule rule;
  if (rule.order != f.gh_order) rule = GaussHermiteRule::make(f.gh_order);
  const auto [center, scale] = f.envelope(x, x_prime);
  auto phi = [&](const Vec3& y) {
    return f.left(x, y) * f.right(y, x_prime) * std::exp(scale * (y - center).squaredNorm());
  };
  return gauss_hermite_integral(phi, center, scale, rule);
}

AveragingProbe average_diagonal(const std::function<Complex(const Vec3&, const Vec3&)>& c,
                                const Vec3& x, Complex limit, std::span<const double> epsilons,
                                int subdivisions) {
  AveragingProbe probe;
  probe.dimension = 6;
  probe.limit = limit;
  const double at[6] = {x[0], x[1], x[2], x[0], x[1], x[2]};
  const PointFunction on_product = [&c](std::span<const double> z) {
    return c(Vec3(z[0], z[1], z[2]), Vec3(z[3], z[4], z[5]));
  };
  double previous = 0.0;
  for (double eps : epsilons) {
    if (!probe.rows.empty() && !(eps < previous)) {
      throw ParameterError("average_diagonal: epsilons must be strictly decreasing");
    }
    previous = eps;
    AveragingRow row;
    row.epsilon = eps;
    row.value = local_average(on_product, std::span<const double>(at, 6), eps, subdivisions);
    row.abs_error = std::abs(row.value - limit);
    probe.rows.push_back(row);
  }
  probe.strictly_decreasing = true;
  for (std::size_t i = 1; i < probe.rows.size(); ++i) {
    if (!(probe.rows[i].abs_error < probe.rows[i - 1].abs_error)) probe.strictly_decreasing = false;
  }
  const std::size_t m = probe.rows.size();
  probe.tail_decreasing = m < 3 || (probe.rows[m - 1].abs_error < probe.rows[m - 2].abs_error &&
                                    probe.rows[m - 2].abs_error < probe.rows[m - 3].abs_error);
  return probe;
}

AveragingProbe diag_via_averaging(const Factorization& f, const Vec3& x,
                                  std::span<const double> epsilons, int subdivisions) {
  const Complex direct = factorized_entry(f, x, x);
  return average_diagonal(
      [&f](const Vec3& a, const Vec3& b) { return factorized_entry(f, a, b); }, x, direct,
      epsilons, subdivisions);
}

}  // namespace crdm
