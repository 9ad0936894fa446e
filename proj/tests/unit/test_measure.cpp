#include <cmath>
#include <vector>

#include "crdm/measure.hpp"
#include "doctest.h"
#include "oracles.hpp"

using crdm::Complex;
using crdm::Vec3;

namespace {

double x0[1] = {0.0};

}  // namespace

TEST_CASE("1D average of x^2 at the origin") {
  const crdm::RealPointFunction f = [](std::span<const double> x) { return x[0] * x[0]; };
  for (double eps : {1.0, 0.5, 0.125}) {
    for (int m : {1, 4, 64}) {
      // The midpoint rule is exact up to its own error term eps^2 / (3 m^2).
      const double v = crdm::local_average(f, x0, eps, m);
      CHECK(v == doctest::Approx(eps * eps / 3.0 - eps * eps / (3.0 * m * m)).epsilon(1e-14));
      CHECK(std::abs(v - eps * eps / 3.0) <= eps * eps / (3.0 * m * m) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("averages of constants and linearity") {
  const double at[3] = {0.3, -0.2, 1.1};
  const crdm::PointFunction c = [](std::span<const double>) { return Complex(2.5, -1.0); };
  CHECK(std::abs(crdm::local_average(c, at, 0.7, 5) - Complex(2.5, -1.0)) < 1e-15);

  const crdm::PointFunction f = [](std::span<const double> x) {
    return Complex(std::sin(x[0]) * x[1], x[2] * x[2]);
  };
  const crdm::PointFunction g = [](std::span<const double> x) {
    return Complex(std::exp(-x[0] * x[0] - x[1] * x[1]), std::cos(x[2]));
  };
  const Complex a(1.5, 0.5);
  const Complex b(-0.25, 2.0);
  const crdm::PointFunction mix = [&](std::span<const double> x) { return a * f(x) + b * g(x); };
  const Complex lhs = crdm::local_average(mix, at, 0.4, 6);
  const Complex rhs = a * crdm::local_average(f, at, 0.4, 6) + b * crdm::local_average(g, at, 0.4, 6);
  CHECK(std::abs(lhs - rhs) <= 1e-14 * std::abs(rhs));
}

TEST_CASE("a single-point spike off the sample set leaves the average unchanged") {
  const crdm::RealPointFunction f = [](std::span<const double> x) { return std::cos(x[0]); };
  const crdm::RealPointFunction spiked = [&](std::span<const double> x) {
    return x[0] == 0.0 ? 1e6 : f(x);
  };
  // Even subdivisions put no midpoint at the centre.
  CHECK(crdm::local_average(spiked, x0, 0.5, 8) == crdm::local_average(f, x0, 0.5, 8));
}

TEST_CASE("maximal function dominates every member of its epsilon set") {
  const crdm::PointFunction f = [](std::span<const double> x) {
    return Complex(std::exp(-4.0 * (x[0] - 0.3) * (x[0] - 0.3)), 0.0);
  };
  const auto eps = crdm::default_epsilons();
  const double m = crdm::maximal_function(f, x0, eps, 16);
  for (double e : eps) CHECK(std::abs(crdm::local_average(f, x0, e, 16)) <= m);
  CHECK_THROWS_AS(crdm::maximal_function(f, x0, std::vector<double>{}, 4), crdm::ParameterError);
}

TEST_CASE("empirical maximal inequality on a Gaussian") {
  // Discrete L^2 norm of Mf over a fine line against that of f; the ratio is
  // reported rather than compared with an exact constant.
  const crdm::PointFunction f = [](std::span<const double> x) {
    return Complex(std::exp(-x[0] * x[0]), 0.0);
  };
  const auto eps = crdm::default_epsilons();
  double mf2 = 0.0;
  double f2 = 0.0;
  const double h = 0.05;
  for (int i = -160; i <= 160; ++i) {
    const double at[1] = {i * h};
    const double m = crdm::maximal_function(f, at, eps, 8);
    mf2 += h * m * m;
    f2 += h * std::norm(f(at));
  }
  const double ratio = std::sqrt(mf2 / f2);
  MESSAGE("fitted maximal constant: " << ratio);
  CHECK(ratio >= 1.0 - 1e-3);
  CHECK(std::isfinite(ratio));
}

TEST_CASE("smoothing lemma constant bounds the sup-norm of averaged differences") {
  // f_k - f = g / k with g a Gaussian bump; ||g||_2 = (pi/2)^{n/4}.
  for (int n : {1, 2}) {
    const crdm::PointFunction g = [](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return Complex(std::exp(-r2), 0.0);
    };
    const double g_norm = std::pow(oracle::kPi / 2.0, n / 4.0);
    for (int k : {1, 4, 16}) {
      for (double eps : {1.0, 0.25, 0.0625}) {
        const crdm::PointFunction diff = [&](std::span<const double> x) { return g(x) / double(k); };
        double sup = 0.0;
        for (double c : {-0.5, 0.0, 0.2}) {
          const std::vector<double> at(n, c);
          sup = std::max(sup, std::abs(crdm::local_average(diff, at, eps, 8)));
        }
        const double bound = crdm::averaging_sup_constant(n, eps, 2.0) * g_norm / k;
        CHECK(sup <= bound);
      }
    }
  }
  CHECK(crdm::averaging_sup_constant(1, 0.5, 2.0) == doctest::Approx(1.0));
  CHECK(crdm::averaging_sup_constant(2, 0.25, 2.0) == doctest::Approx(2.0));
  CHECK(crdm::averaging_sup_constant(3, 0.5, 3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(crdm::averaging_sup_constant(1, 0.5, 1.0), crdm::ParameterError);
}

TEST_CASE("default epsilon ladder") {
  const auto eps = crdm::default_epsilons();
  REQUIRE(eps.size() == 9);
  CHECK(eps.front() == 1.0);
  CHECK(eps.back() == 1.0 / 256.0);
}

TEST_CASE("factorised diagonal reproduces the density") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kappa = crdm::kappa_rigid_rotation(Vec3(0, 0, 1));
  const auto f = crdm::factorization_of(crdm::factor_g(kappa, 0.5).with_density(rho), 16);
  for (const Vec3& x : {Vec3(1, 0, 0), Vec3(0.2, -0.3, 0.1)}) {
    const Complex d = crdm::factorized_entry(f, x, x);
    CHECK(d.real() == doctest::Approx(rho(x)).epsilon(1e-10));
    CHECK(std::abs(d.imag()) < 1e-12);
  }
}

TEST_CASE("averaged factorised kernel approaches its diagonal") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto f = crdm::factorization_of(crdm::factor_g(crdm::kappa_zero(), 0.5).with_density(rho));
  const std::vector<double> eps{0.5, 0.25, 0.125, 0.0625};
  const auto probe = crdm::diag_via_averaging(f, Vec3(0.3, 0.0, -0.2), eps, 2);
  REQUIRE(probe.rows.size() == 4);
  CHECK(probe.dimension == 6);
  CHECK(probe.strictly_decreasing);
  CHECK(probe.tail_decreasing);
  CHECK(probe.limit.real() == doctest::Approx(rho(Vec3(0.3, 0.0, -0.2))).epsilon(1e-8));
  CHECK(probe.final_error() < probe.rows.front().abs_error / 16.0);
}

TEST_CASE("averaging probe input validation") {
  const crdm::RealPointFunction f = [](std::span<const double>) { return 1.0; };
  CHECK_THROWS_AS(crdm::local_average(f, x0, 0.0, 4), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::local_average(f, x0, 1.0, 0), crdm::ParameterError);
  const auto c = [](const Vec3&, const Vec3&) { return Complex(1.0); };
  const std::vector<double> bad{0.5, 0.5};
  CHECK_THROWS_AS(crdm::average_diagonal(c, Vec3::Zero(), Complex(1.0), bad, 1),
                  crdm::ParameterError);
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  CHECK_THROWS_AS(crdm::factorization_of(crdm::factor_g(crdm::kappa_zero(), 0.5)),
                  crdm::ParameterError);
}
