#include <cmath>
#include <numeric>
#include <vector>

#include "crdm/fields.hpp"
#include "crdm/quadrature.hpp"
#include "doctest.h"
#include "oracles.hpp"

using crdm::Complex;
using crdm::Vec3;

TEST_CASE("grid weights sum to the box volume") {
  for (auto rule : {crdm::GridRule::kTrapezoid, crdm::GridRule::kMidpoint}) {
    const auto grid = crdm::GridSpec::box(Vec3(1, 2, 3), Vec3(0.5, 1.0, 2.0), {5, 7, 9}, rule);
    double total = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) total += grid.weight(i);
    CHECK(total == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(grid.volume() == doctest::Approx(8.0).epsilon(1e-14));
  }
}

TEST_CASE("trapezoid nodes include the box corners") {
  const auto grid = crdm::GridSpec::cube(Vec3::Zero(), 1.0, 3);
  CHECK((grid.node(0) - Vec3(-1, -1, -1)).norm() < 1e-15);
  CHECK((grid.node(grid.size() - 1) - Vec3(1, 1, 1)).norm() < 1e-15);
  CHECK((grid.node(13) - Vec3::Zero()).norm() < 1e-15);
  CHECK(grid.on_boundary(0));
  CHECK_FALSE(grid.on_boundary(13));
  CHECK(grid.weight(13) == doctest::Approx(1.0));
  CHECK(grid.weight(0) == doctest::Approx(0.125));
}

TEST_CASE("pairwise sum agrees with a long double accumulation") {
  std::vector<double> v(10007);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
  long double ref = 0.0L;
  for (double x : v) ref += x;
  CHECK(crdm::pairwise_sum(std::span<const double>(v)) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-15));
  CHECK(crdm::pairwise_sum(std::span<const double>()) == 0.0);
}

TEST_CASE("Gauss-Hermite rules integrate monomials exactly up to degree 2n-1") {
  for (int order : {2, 5, 8, 16, 32, 64}) {
    const auto rule = crdm::GaussHermiteRule::make(order);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));
    for (int k = 0; k <= std::min(2 * order - 1, 40); ++k) {
      // Odd moments cancel between mirrored nodes, so errors are measured
      // against the absolute moment.
      long double acc = 0.0L;
      long double magnitude = 0.0L;
      for (int i = 0; i < order; ++i) {
        const long double term = static_cast<long double>(rule.weights[i]) *
                                 std::pow(static_cast<long double>(rule.nodes[i]), k);
        acc += term;
        magnitude += std::abs(term);
      }
      const long double ref = oracle::hermite_moment(k);
      CHECK(static_cast<double>(std::abs(acc - ref) / magnitude) <= 1e-13);
    }
    for (int i = 0; i < order; ++i) {
      CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[order - 1 - i]).epsilon(1e-15));
      CHECK(rule.weights[i] > 0.0);
    }
  }
  CHECK_THROWS_AS(crdm::GaussHermiteRule::make(1), crdm::ParameterError);
}

TEST_CASE("tensor Gauss-Hermite reproduces the Gaussian Fourier transform") {
  const auto rule = crdm::GaussHermiteRule::make(24);
  const Complex value = crdm::gauss_hermite_integral(
      [](const Vec3& u) { return std::exp(Complex(0.0, u[0])); }, Vec3::Zero(), 1.0, rule);
  CHECK(value.real() == doctest::Approx(oracle::kGhFourierUnitK).epsilon(1e-13));
  CHECK(std::abs(value.imag()) < 1e-13);
}

TEST_CASE("Gauss-Hermite scale and centre") {
  // int exp(-s |u - c|^2) du = (pi / s)^{3/2}.
  const auto rule = crdm::GaussHermiteRule::make(8);
  for (double s : {0.3, 1.0, 4.7}) {
    const Complex v = crdm::gauss_hermite_integral([](const Vec3&) { return Complex(1.0); },
                                                   Vec3(1, -2, 3), s, rule);
    CHECK(v.real() == doctest::Approx(std::pow(oracle::kPi / s, 1.5)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(crdm::gauss_hermite_integral([](const Vec3&) { return Complex(1.0); },
                                               Vec3::Zero(), 0.0, rule),
                  crdm::ParameterError);
}

TEST_CASE("product rules converge at second order on a smooth integrand") {
  // int over [0,1]^3 of exp(x+y+z) = (e - 1)^3.
  const double exact = std::pow(std::exp(1.0) - 1.0, 3);
  auto f = [](const Vec3& r) { return std::exp(r.sum()); };
  for (auto rule : {crdm::GridRule::kTrapezoid, crdm::GridRule::kMidpoint}) {
    std::vector<double> errors;
    for (std::size_t cells : {8u, 16u, 32u}) {
      const std::size_t count = rule == crdm::GridRule::kTrapezoid ? cells + 1 : cells;
      const auto grid = crdm::GridSpec::cube(Vec3::Constant(0.5), 0.5, count, rule);
      errors.push_back(std::abs(crdm::integrate_box(f, grid) - exact));
    }
    CHECK(std::log2(errors[0] / errors[1]) >= 1.9);
    CHECK(std::log2(errors[1] / errors[2]) >= 1.9);
  }
}

TEST_CASE("grid reductions do not depend on the worker count") {
  const auto rho = crdm::make_gaussian_density(1.0, 0.8);
  const auto grid = rho.default_grid(40);
  auto f = [&](const Vec3& r) { return rho(r) * std::cos(r[0]) * (1.0 + r.squaredNorm()); };
  const double base = crdm::integrate_box(f, grid, crdm::Execution{1});
  for (unsigned w : {2u, 3u, 7u, 64u}) {
    CHECK(crdm::integrate_box(f, grid, crdm::Execution{w}) == base);
  }
}

TEST_CASE("compact boxes and local restriction") {
  const auto box = crdm::CompactBox::cube(Vec3::Zero(), 1.0);
  CHECK(box.contains(Vec3(1.0, -1.0, 0.0)));
  CHECK_FALSE(box.contains(Vec3(1.01, 0.0, 0.0)));
  CHECK(box.contains(crdm::CompactBox::cube(Vec3(0.5, 0, 0), 0.5)));
  CHECK_FALSE(box.contains(crdm::CompactBox::cube(Vec3(0.5, 0, 0), 0.6)));
  CHECK(box.volume() == doctest::Approx(8.0));
  // int over [-1,1]^3 of x^2 = 8/3; trapezoid error is O(h^2).
  const double v = crdm::restrict_local([](const Vec3& r) { return r[0] * r[0]; }, box, 201);
  CHECK(v == doctest::Approx(8.0 / 3.0).epsilon(1e-4));
  CHECK_THROWS_AS(crdm::CompactBox(Vec3::Zero(), Vec3(1.0, 0.0, 1.0)), crdm::ParameterError);
}

TEST_CASE("expanding boxes converge to the whole-space integral") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto seq = crdm::expanding_box_limit(
      [&](const crdm::GridSpec& g) {
        return crdm::integrate_box([&](const Vec3& r) { return rho(r); }, g);
      },
      Vec3::Zero(), {2.0, 4.0, 6.0, 8.0}, 0.2, 1e-8);
  REQUIRE(seq.values.size() == 4);
  CHECK(seq.converged);
  CHECK(seq.value() == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < seq.values.size(); ++i) CHECK(seq.values[i] >= seq.values[i - 1] - 1e-14);
  CHECK_THROWS_AS(crdm::expanding_box_limit([](const crdm::GridSpec&) { return 0.0; },
                                            Vec3::Zero(), {2.0, 1.0}, 0.1),
                  crdm::ParameterError);
}
