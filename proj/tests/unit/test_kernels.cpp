#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "crdm/kernels.hpp"
#include "doctest.h"
#include "oracles.hpp"

using crdm::Complex;
using crdm::Mat3;
using crdm::Vec3;

namespace {

Mat3 gauge_matrix() {
  Mat3 a;
  a << 0.4, 0.1, 0.0, 0.1, -0.3, 0.2, 0.0, 0.2, 0.25;
  return a;
}

std::vector<crdm::KappaField> kappas() {
  return {crdm::kappa_zero(), crdm::kappa_rigid_rotation(Vec3(0, 0, 0.5)),
          crdm::kappa_quadratic_gauge(gauge_matrix()),
          crdm::kappa_rigid_rotation(Vec3(0.2, -0.1, 0.3)) + crdm::kappa_constant(Vec3(0.3, 0, 0))};
}

std::vector<crdm::DensityProfile> densities() {
  return {crdm::make_gaussian_density(1.0, 1.0), crdm::make_exponential_density(2.0, 1.0)};
}

}  // namespace

TEST_CASE("kernels are Hermitian and reproduce the density on the diagonal") {
  const auto pairs = crdm::sample_point_pairs(50, 7, Vec3::Zero(), 2.0, 1.5);
  for (const auto& rho : densities()) {
    for (const auto& kappa : kappas()) {
      for (double theta : {0.0, 0.3, 0.5, 1.0}) {
        const auto k = crdm::kernel_D(rho, kappa, 0.4, 0.7, theta);
        for (const auto& [r, s] : pairs) {
          const Complex ab = k(r, s);
          const Complex ba = k(s, r);
          CHECK(std::abs(ab - std::conj(ba)) <= 1e-15 * (1.0 + std::abs(ab)));
          const double diag = k(r, r).real();
          CHECK(std::abs(diag - rho(r)) <= 1e-15 * rho(r));
          CHECK(k(r, r).imag() == 0.0);
        }
      }
    }
  }
}

TEST_CASE("current-free gaussian kernel has the closed form") {
  const double alpha = 1.2;
  const double lambda = 0.35;
  const auto rho = crdm::make_gaussian_density(1.0, alpha);
  const auto p = crdm::kernel_P(rho, crdm::kappa_zero(), lambda);
  const auto q = crdm::kernel_Q(rho, crdm::kappa_zero(), lambda);
  for (const auto& [r, s] : crdm::sample_point_pairs(20, 3, Vec3::Zero(), 1.5, 2.0)) {
    const long double ref = std::pow(alpha / oracle::kPi, 1.5L) *
                            std::exp(-0.5L * alpha * (r.squaredNorm() + s.squaredNorm()) -
                                     lambda * (r - s).squaredNorm());
    CHECK(p(r, s).real() == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    CHECK(q(r, s).real() == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    CHECK(std::abs(p(r, s).imag()) < 1e-300);
  }
}

TEST_CASE("constant kappa: P carries a plane-wave phase and Q none") {
  const Vec3 k(0.3, -0.6, 0.2);
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto p = crdm::kernel_P(rho, crdm::kappa_constant(k), 0.5);
  const auto q = crdm::kernel_Q(rho, crdm::kappa_constant(k), 0.5);
  const auto p0 = crdm::kernel_P(rho, crdm::kappa_zero(), 0.5);
  const Vec3 r(0.2, 0.1, -0.4);
  const Vec3 s(-0.5, 0.3, 0.1);
  const Complex plane = std::exp(Complex(0.0, (r - s).dot(k)));
  CHECK(std::abs(p(r, s) - plane * p0(r, s)) < 1e-15);
  CHECK(std::abs(q(r, s) - p0(r, s)) < 1e-15);
}

TEST_CASE("unit normalisation of the factor") {
  // int |g(u, v)|^2 du = 1 for every v.
  for (double w : {0.1, 0.5, 2.0}) {
    const double a = crdm::KernelFactor::amplitude(w);
    const long double integral = a * a * std::pow(oracle::kPi / (4.0L * w), 1.5L);
    CHECK(static_cast<double>(integral) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("factorisation residuals fall below 1e-8 at order 32 and decrease") {
  const auto pairs = crdm::sample_point_pairs(64, 11, Vec3::Zero(), 1.5, 1.5);
  for (const auto& rho : densities()) {
    for (const auto& kappa : kappas()) {
      const double lambda = 0.5;
      const double mu = 0.5;
      const auto g = crdm::factor_g(kappa, lambda).with_density(rho);
      const auto h = crdm::factor_h(kappa, mu).with_density(rho);
      const auto sg = crdm::factorization_study(g, crdm::kernel_P(rho, kappa, lambda), pairs,
                                                {8, 16, 32});
      const auto sh = crdm::factorization_study(h, crdm::kernel_Q(rho, kappa, mu), pairs,
                                                {8, 16, 32});
      CHECK(sg.final_residual() <= 1e-8);
      CHECK(sh.final_residual() <= 1e-8);
      CHECK(sg.monotone);
      CHECK(sh.monotone);
    }
  }
}

TEST_CASE("a wrong-sign phase is detected by the factorisation residual") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kappa = crdm::kappa_quadratic_gauge(gauge_matrix());
  const double lambda = 0.5;
  const double amp = crdm::KernelFactor::amplitude(lambda);
  const crdm::KernelFactor flipped(
      crdm::FactorKind::kG, lambda,
      [=](const Vec3& u, const Vec3& v) {
        return std::polar(amp * std::exp(-2.0 * lambda * (u - v).squaredNorm()), v.dot(kappa(v)));
      },
      rho);
  const auto pairs = crdm::sample_point_pairs(32, 5, Vec3::Zero(), 1.5, 1.5);
  CHECK(crdm::factorization_residual(flipped, crdm::kernel_P(rho, kappa, lambda), pairs, 32) >
        1e-3);
}

TEST_CASE("Gram matrices of the kernels are positive semidefinite") {
  const auto pts = crdm::sample_points(40, 19, Vec3::Zero(), 2.0);
  for (const auto& kappa : kappas()) {
    const auto k = crdm::kernel_D(crdm::make_gaussian_density(1.0, 1.0), kappa, 0.3, 0.6);
    Eigen::MatrixXcd m(pts.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < pts.size(); ++j) m(i, j) = k(pts[i], pts[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * eig.eigenvalues().maxCoeff());
  }
}

TEST_CASE("admissible lambda matches the reference values") {
  const auto a = crdm::admissible_lambda(1.0, 1.0, 2.0, 2);
  CHECK(a.p == 2.0);
  CHECK(a.lambda_min == doctest::Approx(oracle::kLambdaMinUnitNorm).epsilon(1e-14));
  const auto g = crdm::admissible_lambda(1.0, oracle::kGaussianN1Norm2, 2.0, 2);
  CHECK(g.lambda_min == doctest::Approx(oracle::kLambdaMinGaussian).epsilon(1e-14));
  for (double q : {1.5, 2.0, 3.0, 6.0}) {
    for (int occ : {1, 2}) {
      CHECK(crdm::admissible_lambda(2.0, 0.4, q, occ).lambda_min ==
            doctest::Approx(static_cast<double>(oracle::lambda_min(2.0L, 0.4L, q, occ)))
                .epsilon(1e-14));
    }
  }
}

TEST_CASE("spin-resolved occupation raises lambda_min by 4^{2p/3}") {
  const double r2 = crdm::admissible_lambda(1.0, 0.3, 2.0, 1).lambda_min /
                    crdm::admissible_lambda(1.0, 0.3, 2.0, 2).lambda_min;
  CHECK(r2 == doctest::Approx(oracle::kFourToFourThirds).epsilon(1e-12));
  const double r3 = crdm::admissible_lambda(1.0, 0.3, 3.0, 1).lambda_min /
                    crdm::admissible_lambda(1.0, 0.3, 3.0, 2).lambda_min;
  CHECK(r3 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("point sampling is deterministic and respects the separation") {
  const auto a = crdm::sample_point_pairs(100, 42, Vec3(1, 0, 0), 2.0, 0.5);
  const auto b = crdm::sample_point_pairs(100, 42, Vec3(1, 0, 0), 2.0, 0.5);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second == b[i].second);
    CHECK((a[i].second - a[i].first).norm() <= 0.5);
    CHECK((a[i].first - Vec3(1, 0, 0)).cwiseAbs().maxCoeff() <= 2.0);
  }
  CHECK(crdm::sample_point_pairs(100, 43, Vec3(1, 0, 0), 2.0, 0.5)[0].first != a[0].first);
}

TEST_CASE("invalid kernel parameters throw") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kz = crdm::kappa_zero();
  CHECK_THROWS_AS(crdm::kernel_D(rho, kz, 1.0, 1.0, 1.5), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::kernel_D(rho, kz, 1.0, 1.0, -0.1), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::kernel_D(rho, kz, 1.0, 1.0, 0.5, 3), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::kernel_P(rho, kz, 0.0), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::kernel_Q(rho, kz, -1.0), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::factor_g(kz, 0.0), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::admissible_lambda(1.0, 1.0, 1.0, 2), crdm::ParameterError);
  CHECK_THROWS_AS(crdm::admissible_lambda(1.0, 1.0, 2.0, 0), crdm::ParameterError);
  const auto pairs = crdm::sample_point_pairs(2, 1, Vec3::Zero(), 1.0, 1.0);
  const auto g = crdm::factor_g(kz, 1.0);
  CHECK_THROWS_AS(crdm::factorization_residual(g, crdm::kernel_P(rho, kz, 1.0), pairs, 16),
                  crdm::ParameterError);
  CHECK_THROWS_AS(crdm::factorization_residual(g.with_density(rho), crdm::kernel_P(rho, kz, 1.0),
                                               pairs, 4),
                  crdm::ParameterError);
}
