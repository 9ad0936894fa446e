#include "crdm/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace crdm {

namespace {

// Orthonormal Hermite recurrence: returns p_{n}(x) and p_{n-1}(x) for
// polynomials orthonormal against exp(-x^2).
std::pair<double, double> hermite_orthonormal(int n, double x) {
  double p_prev = 0.0;
  double p = 1.0 / std::pow(kPi, 0.25);
  for (int k = 1; k <= n; ++k) {
    const double p_next = x * std::sqrt(2.0 / k) * p - std::sqrt((k - 1.0) / k) * p_prev;
    p_prev = p;
    p = p_next;
  }
  return {p, p_prev};
}

}  // namespace

GaussHermiteRule GaussHermiteRule::make(int order) {
  if (order < 2) throw ParameterError("Gauss-Hermite order must be at least 2");
  // Golub-Welsch for starting nodes, then Newton polishing on the orthonormal
  // recurrence; weights from the Christoffel function.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);

  GaussHermiteRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = eig.eigenvalues()[i];
    for (int it = 0; it < 8; ++it) {
      const auto [p, p_prev] = hermite_orthonormal(order, x);
      const double dp = std::sqrt(2.0 * order) * p_prev;
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;
    double christoffel = 0.0;
    double p_prev = 0.0;
    double p = 1.0 / std::pow(kPi, 0.25);
    for (int k = 0; k < order; ++k) {
      christoffel += p * p;
      const double p_next = x * std::sqrt(2.0 / (k + 1)) * p - std::sqrt(double(k) / (k + 1)) * p_prev;
      p_prev = p;
      p = p_next;
    }
    rule.weights[i] = 1.0 / christoffel;
  }
  // Exact symmetry of the rule.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

Complex gauss_hermite_integral(const std::function<Complex(const Vec3&)>& phi,
                               const Vec3& center, double scale, const GaussHermiteRule& rule) {
  if (!(scale > 0.0)) throw ParameterError("Gauss-Hermite scale must be positive");
  const double inv = 1.0 / std::sqrt(scale);
  const int n = rule.order;
  std::vector<Complex> plane(static_cast<std::size_t>(n) * n);
  std::vector<Complex> outer(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<Complex> line(n);
      for (int k = 0; k < n; ++k) {
        const Vec3 u = center + inv * Vec3(rule.nodes[i], rule.nodes[j], rule.nodes[k]);
        line[k] = rule.weights[k] * phi(u);
      }
      plane[i * n + j] = rule.weights[j] * pairwise_sum(std::span<const Complex>(line));
    }
    outer[i] = rule.weights[i] *
               pairwise_sum(std::span<const Complex>(plane).subspan(std::size_t(i) * n, n));
  }
  return pairwise_sum(std::span<const Complex>(outer)) * (inv * inv * inv);
}

CompactBox::CompactBox(Vec3 c, Vec3 hw) : center(std::move(c)), half_widths(std::move(hw)) {
  if (!(half_widths.array() > 0.0).all()) {
    throw ParameterError("compact box needs positive half-widths");
  }
}

bool CompactBox::contains(const Vec3& r) const {
  return ((r - center).cwiseAbs().array() <= half_widths.array()).all();
}

bool CompactBox::contains(const CompactBox& other) const {
  const Vec3 lo = other.center - other.half_widths;
  const Vec3 hi = other.center + other.half_widths;
  return contains(lo) && contains(hi);
}

GridSpec CompactBox::grid(std::size_t count_per_axis, GridRule rule) const {
  return GridSpec::box(center, half_widths, {count_per_axis, count_per_axis, count_per_axis},
                       rule);
}

double restrict_local(const std::function<double(const Vec3&)>& f, const CompactBox& box,
                      std::size_t count_per_axis, const Execution& exec) {
  return integrate_box<double>(f, box.grid(count_per_axis), exec);
}

BoxSequenceLimit expanding_box_limit(const std::function<double(const GridSpec&)>& functional,
                                     const Vec3& center, const std::vector<double>& half_widths,
                                     double spacing, double tolerance) {
  if (half_widths.empty()) throw ParameterError("expanding box sequence is empty");
  if (!(spacing > 0.0)) throw ParameterError("expanding box spacing must be positive");
  BoxSequenceLimit out;
  out.tolerance = tolerance;
  for (double hw : half_widths) {
    if (!out.half_widths.empty() && hw <= out.half_widths.back()) {
      throw ParameterError("expanding box half-widths must increase");
    }
    auto count = static_cast<std::size_t>(std::llround(2.0 * hw / spacing)) + 1;
    if (count % 2 == 1) ++count;
    out.half_widths.push_back(hw);
    out.values.push_back(functional(GridSpec::cube(center, hw, count)));
  }
  if (out.values.size() >= 2) {
    const double last = out.values.back();
    const double prev = out.values[out.values.size() - 2];
    out.converged = std::abs(last - prev) <= tolerance * std::max(1.0, std::abs(last));
  }
  return out;
}

}  // namespace crdm
