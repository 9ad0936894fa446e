#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "crdm/grid.hpp"
#include "crdm/types.hpp"

namespace crdm {

/// Pairwise (tree) summation. The association order depends only on the
/// length of the input.
template <class T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc = acc + values[i];
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are static,
/// so each index is processed exactly once regardless of worker count.
template <class Body>
void parallel_for(std::size_t n, const Execution& exec, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(exec.workers, n));
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

/// Deterministic reduction of term(index, node, weight) over all grid nodes.
/// Each x-slab is summed pairwise, then the slab sums are summed pairwise, so
/// memory stays O(ny*nz) and the result is independent of exec.workers.
template <class T, class Term>
T reduce_grid(const GridSpec& grid, Term&& term, const Execution& exec = {}) {
  const auto& n = grid.counts();
  const std::size_t slab = n[1] * n[2];
  std::vector<T> slab_sums(n[0], T{});
  parallel_for(n[0], exec, [&](std::size_t begin, std::size_t end) {
    std::vector<T> buf(slab);
    for (std::size_t ix = begin; ix < end; ++ix) {
      for (std::size_t k = 0; k < slab; ++k) {
        const std::size_t idx = ix * slab + k;
        buf[k] = term(idx, grid.node(idx), grid.weight(idx));
      }
      slab_sums[ix] = pairwise_sum(std::span<const T>(buf));
    }
  });
  return pairwise_sum(std::span<const T>(slab_sums));
}

/// Product-rule quadrature sum_i w_i f(r_i).
template <class T = double, class F>
T integrate_box(F&& f, const GridSpec& grid, const Execution& exec = {}) {
  return reduce_grid<T>(
      grid, [&](std::size_t, const Vec3& r, double w) -> T { return w * f(r); }, exec);
}

/// Gauss-Hermite rule for weight exp(-t^2) on the real line.
struct GaussHermiteRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  static GaussHermiteRule make(int order);
};

/// Approximates  integral exp(-scale |u - center|^2) phi(u) du  over R^3 with
/// the tensorised rule. phi is the integrand with the Gaussian envelope
/// divided out.
Complex gauss_hermite_integral(const std::function<Complex(const Vec3&)>& phi,
                               const Vec3& center, double scale, const GaussHermiteRule& rule);

/// Compact axis-aligned box used for all locally integrable quantities.
struct CompactBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_widths = Vec3::Ones();

  CompactBox() = default;
  CompactBox(Vec3 c, Vec3 hw);
  static CompactBox cube(const Vec3& c, double hw) { return {c, Vec3::Constant(hw)}; }

  bool contains(const Vec3& r) const;
  bool contains(const CompactBox& other) const;
  double volume() const { return (2.0 * half_widths).prod(); }
  GridSpec grid(std::size_t count_per_axis, GridRule rule = GridRule::kTrapezoid) const;
};

/// Integral of f over the box only, trapezoid rule with count nodes per axis.
double restrict_local(const std::function<double(const Vec3&)>& f, const CompactBox& box,
                      std::size_t count_per_axis, const Execution& exec = {});

/// Values of a box functional over an expanding sequence of cubes.
struct BoxSequenceLimit {
  std::vector<double> half_widths;
  std::vector<double> values;
  double tolerance = 0.0;
  /// Last two values agree within tolerance * max(1, |value|).
  bool converged = false;
  double value() const { return values.empty() ? 0.0 : values.back(); }
};

/// Evaluates functional(grid) on cubes centred at `center` with the given
/// half-widths and a fixed target spacing.
BoxSequenceLimit expanding_box_limit(const std::function<double(const GridSpec&)>& functional,
                                     const Vec3& center, const std::vector<double>& half_widths,
                                     double spacing, double tolerance = 1e-8);

}  // namespace crdm
