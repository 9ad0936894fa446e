#pragma once

#include <functional>
#include <span>
#include <vector>

#include "crdm/kernels.hpp"
#include "crdm/types.hpp"

namespace crdm {

using PointFunction = std::function<Complex(std::span<const double>)>;
using RealPointFunction = std::function<double(std::span<const double>)>;

/// Box average (2 eps)^{-n} int_{[-eps,eps]^n} f(x + y) dy by the tensor
/// midpoint rule with `subdivisions` cells per axis; n = x.size().
Complex local_average(const PointFunction& f, std::span<const double> x, double eps,
                      int subdivisions);
double local_average(const RealPointFunction& f, std::span<const double> x, double eps,
                     int subdivisions);

/// max over eps_set of the average of |f|. Any finite set gives a lower bound
/// on the supremum over all eps > 0.
double maximal_function(const PointFunction& f, std::span<const double> x,
                        std::span<const double> eps_set, int subdivisions);

/// Sup-norm constant of A_eps from L^p: (2 eps)^{n (1/q - 1)}, 1/p + 1/q = 1.
double averaging_sup_constant(int dimension, double eps, double p);

/// 1, 1/2, ..., 2^-8.
std::vector<double> default_epsilons();

struct AveragingRow {
  double epsilon = 0.0;
  Complex value;
  double abs_error = 0.0;
};

struct AveragingProbe {
  int dimension = 0;
  Complex limit;
  std::vector<AveragingRow> rows;
  /// abs_error strictly decreasing along the whole table.
  bool strictly_decreasing = false;
  /// abs_error decreasing over the last three epsilons; a failure here is the
  /// flagged non-convergence case.
  bool tail_decreasing = false;
  double final_error() const { return rows.empty() ? 0.0 : rows.back().abs_error; }
};

/// C = P * Q with P(x, y) = left(x, y) and Q(y, x') = right(y, x'); the
/// y-integral is Gaussian-weighted with envelope exp(-scale |y - center|^2)
/// supplied per (x, x').
struct Factorization {
  std::function<Complex(const Vec3&, const Vec3&)> left;
  std::function<Complex(const Vec3&, const Vec3&)> right;
  std::function<std::pair<Vec3, double>(const Vec3&, const Vec3&)> envelope;
  int gh_order = 8;
};

/// P = F^dagger, Q = F for a density-weighted factor F, so C = F^dagger * F.
Factorization factorization_of(const KernelFactor& factor, int gh_order = 8);

/// int P(x, y) Q(y, x') dy by Gauss-Hermite quadrature.
Complex factorized_entry(const Factorization& f, const Vec3& x, const Vec3& x_prime);

/// Table of A_eps C at (x, x) in R^6 against `limit`.
AveragingProbe average_diagonal(const std::function<Complex(const Vec3&, const Vec3&)>& c,
                                const Vec3& x, Complex limit, std::span<const double> epsilons,
                                int subdivisions);

/// average_diagonal with C and its direct diagonal both from the factorization.
AveragingProbe diag_via_averaging(const Factorization& f, const Vec3& x,
                                  std::span<const double> epsilons, int subdivisions = 4);

}  // namespace crdm
