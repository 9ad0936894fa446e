#include <cmath>

#include "crdm/observables.hpp"
#include "doctest.h"
#include "oracles.hpp"

using crdm::Mat3;
using crdm::Vec3;

namespace {

Mat3 gauge_matrix() {
  Mat3 a;
  a << 0.4, 0.1, 0.0, 0.1, -0.3, 0.2, 0.0, 0.2, 0.25;
  return a;
}

crdm::GridSpec gaussian_grid(std::size_t count = 48) {
  return crdm::GridSpec::cube(Vec3::Zero(), 8.0, count);
}

}  // namespace

TEST_CASE("diagonal density of D") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto k = crdm::kernel_D(rho, crdm::kappa_rigid_rotation(Vec3(0, 0, 1)), 0.3, 0.4);
  for (const Vec3& r : crdm::sample_points(20, 1, Vec3::Zero(), 2.0)) {
    CHECK(crdm::diag_density(k, r) == doctest::Approx(rho(r)).epsilon(1e-15));
  }
}

TEST_CASE("analytic currents of P and Q average to rho kappa / 2") {
  const auto rho = crdm::make_exponential_density(1.0, 1.0);
  for (const auto& kappa : {crdm::kappa_rigid_rotation(Vec3(0.1, 0.2, 0.5)),
                            crdm::kappa_quadratic_gauge(gauge_matrix()),
                            crdm::kappa_constant(Vec3(1, 0, 0))}) {
    for (const Vec3& r : crdm::sample_points(30, 2, Vec3::Zero(), 3.0)) {
      const Vec3 avg =
          0.5 * (crdm::current_P_analytic(rho, kappa, r) + crdm::current_Q_analytic(rho, kappa, r));
      CHECK((avg - crdm::eval_jp(rho, kappa, r)).norm() <= 1e-12 * std::max(1.0, rho(r)));
    }
  }
}

TEST_CASE("finite-difference current of D matches rho kappa / 2") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto grid = crdm::GridSpec::cube(Vec3::Zero(), 4.0, 12);
  for (const auto& kappa :
       {crdm::kappa_rigid_rotation(Vec3(0, 0, 0.5)), crdm::kappa_quadratic_gauge(gauge_matrix())}) {
    const auto k = crdm::kernel_D(rho, kappa, 0.3, 0.3);
    const auto cmp = crdm::compare_current_fd(
        k, [&](const Vec3& r) { return crdm::eval_jp(rho, kappa, r); }, grid);
    CHECK(cmp.rel_l2 <= 1e-6);
    CHECK(cmp.rough_nodes == 0);
  }
}

TEST_CASE("rigid rotation: P carries no current and Q carries rho kappa") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kappa = crdm::kappa_rigid_rotation(Vec3(0, 0, 0.5));
  const auto grid = crdm::GridSpec::cube(Vec3::Zero(), 4.0, 12);
  for (const Vec3& r : crdm::sample_points(10, 3, Vec3::Zero(), 2.0)) {
    CHECK(crdm::current_P_analytic(rho, kappa, r).norm() < 1e-16);
  }
  const auto p = crdm::compare_current_fd(crdm::kernel_P(rho, kappa, 0.3),
                                          [](const Vec3&) { return Vec3::Zero(); }, grid);
  CHECK(p.abs_l2 <= 1e-8);
  const auto q = crdm::compare_current_fd(
      crdm::kernel_Q(rho, kappa, 0.3), [&](const Vec3& r) { return Vec3(rho(r) * kappa(r)); },
      grid);
  CHECK(q.rel_l2 <= 1e-6);
}

TEST_CASE("current finite differences converge at second order before Richardson") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kappa = crdm::kappa_quadratic_gauge(gauge_matrix());
  const auto k = crdm::kernel_D(rho, kappa, 0.3, 0.3);
  const Vec3 r(0.4, -0.3, 0.6);
  const Vec3 exact = crdm::eval_jp(rho, kappa, r);
  const double e1 = (crdm::extract_current_fd(k, r, 1e-2).coarse - exact).norm();
  const double e2 = (crdm::extract_current_fd(k, r, 5e-3).coarse - exact).norm();
  const double e3 = (crdm::extract_current_fd(k, r, 2.5e-3).coarse - exact).norm();
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("tau: D is the theta mixture of P and Q") {
  const auto rho = crdm::make_gaussian_density(1.5, 0.8);
  const auto kappa = crdm::kappa_rigid_rotation(Vec3(0.2, 0, 0.7)) +
                     crdm::kappa_quadratic_gauge(gauge_matrix());
  for (const Vec3& r : crdm::sample_points(25, 4, Vec3::Zero(), 2.5)) {
    const double p = crdm::tau_P(rho, kappa, 0.2, r).value;
    const double q = crdm::tau_Q(rho, kappa, 0.6, r).value;
    CHECK(crdm::tau_D(rho, kappa, 0.2, 0.6, r).value ==
          doctest::Approx(0.5 * (p + q)).epsilon(1e-15));
    CHECK(crdm::tau_D(rho, kappa, 0.2, 0.6, r, 0.25).value ==
          doctest::Approx(0.25 * p + 0.75 * q).epsilon(1e-15));
  }
  CHECK_THROWS_AS(crdm::tau_D(rho, kappa, 0.2, 0.6, Vec3::Zero(), 2.0), crdm::ParameterError);
}

TEST_CASE("tau closed forms agree with mixed finite differences of the kernel") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kappa = crdm::kappa_rigid_rotation(Vec3(0.1, -0.2, 0.5)) +
                     crdm::kappa_quadratic_gauge(gauge_matrix());
  const double lambda = 0.3;
  const double mu = 0.45;
  const auto pts = crdm::sample_points(40, 5, Vec3::Zero(), 2.0);
  for (double theta : {0.0, 0.5, 1.0}) {
    const auto k = crdm::kernel_D(rho, kappa, lambda, mu, theta);
    for (const Vec3& r : pts) {
      const double analytic = crdm::tau_D(rho, kappa, lambda, mu, r, theta).value;
      const auto fd = crdm::tau_fd(k, r);
      CHECK(oracle::rel_diff(fd.value, analytic) <= 1e-6);
    }
  }
}

TEST_CASE("tau flags the cusp and floors vanishing densities") {
  const auto expo = crdm::make_exponential_density(1.0, 1.0);
  CHECK(crdm::tau_P(expo, crdm::kappa_zero(), 0.5, Vec3::Zero()).singular);
  const auto gauss = crdm::make_gaussian_density(1.0, 1.0);
  const auto far = crdm::tau_P(gauss, crdm::kappa_zero(), 0.5, Vec3(30, 0, 0));
  CHECK(far.floored);
  CHECK_FALSE(far.singular);
  CHECK(far.value == 0.0);
}

TEST_CASE("von Weizsaecker energy of the presets") {
  const auto g = crdm::make_gaussian_density(1.0, 1.0);
  CHECK(crdm::functional_T_W(g, gaussian_grid()).value ==
        doctest::Approx(static_cast<double>(oracle::gaussian_tw(1.0L, 1.0L))).epsilon(1e-9));
  const auto g2 = crdm::make_gaussian_density(2.0, 0.6);
  CHECK(crdm::functional_T_W(g2, g2.default_grid(64)).value ==
        doctest::Approx(static_cast<double>(oracle::gaussian_tw(2.0L, 0.6L))).epsilon(1e-9));
  // The cusp costs accuracy; errors shrink with refinement.
  const auto e = crdm::make_exponential_density(1.0, 1.0);
  const double exact = static_cast<double>(oracle::exponential_tw(1.0L, 1.0L));
  const double coarse = std::abs(crdm::functional_T_W(e, e.default_grid(48)).value - exact);
  const double fine = std::abs(crdm::functional_T_W(e, e.default_grid(96)).value - exact);
  CHECK(fine < coarse);
}

TEST_CASE("rigid rotation functionals reproduce the closed forms") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kappa = crdm::kappa_rigid_rotation(Vec3(0, 0, 1));
  const auto grid = gaussian_grid();
  CHECK(crdm::functional_T_p(rho, kappa, grid).value ==
        doctest::Approx(oracle::kTpRigid).epsilon(1e-6));
  const auto tab = crdm::functional_T_ab(rho, kappa, grid);
  CHECK(tab.sum == doctest::Approx(oracle::kTabSumRigid).epsilon(1e-6));
  // Only (x,y) and (y,x) are nonzero, 2.5 each.
  CHECK(tab.components(0, 1) == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(tab.components(1, 0) == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(tab.components(2, 2) == 0.0);
  CHECK(crdm::vorticity_moment(rho, kappa, grid).value ==
        doctest::Approx(oracle::kVorticityMomentRigid).epsilon(1e-6));
  const auto m = crdm::jacobian_moments(rho, kappa, grid);
  CHECK(m.plain == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(m.r_squared == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("current-free integrated tau is T_W plus the width term") {
  // int tau_D = T_W + (3/2)(lambda + mu) N for kappa = 0: each Gaussian width
  // contributes lambda per Cartesian direction.
  const double lambda = 0.2;
  const double mu = 0.5;
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto grid = gaussian_grid();
  const double integral =
      crdm::tau_integral(rho, crdm::kappa_zero(), lambda, mu, 0.5, grid).value;
  CHECK(integral == doctest::Approx(0.75 + 1.5 * (lambda + mu)).epsilon(1e-6));
  const double fd = crdm::tau_integral_fd(crdm::kernel_D(rho, crdm::kappa_zero(), lambda, mu),
                                          crdm::GridSpec::cube(Vec3::Zero(), 8.0, 32))
                        .value;
  CHECK(fd == doctest::Approx(0.75 + 1.5 * (lambda + mu)).epsilon(1e-5));
}

TEST_CASE("bounds bracket the integrated kinetic-energy density") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto grid = gaussian_grid();
  for (const auto& kappa : {crdm::kappa_zero(), crdm::kappa_rigid_rotation(Vec3(0, 0, 1)),
                            crdm::kappa_quadratic_gauge(gauge_matrix())}) {
    crdm::FunctionalInputs in;
    in.lambda = 0.3;
    in.mu = 0.3;
    in.include_fd_tau = false;
    const auto rep = crdm::compute_functional_report(rho, kappa, in, grid);
    CHECK(rep.sandwich.lower <= rep.tau_analytic);
    // Equality for kappa = 0, so allow rounding.
    CHECK(rep.tau_analytic <= rep.bound_representability_corrected * (1.0 + 1e-12));
    CHECK(rep.bound_representability_corrected - rep.bound_representability ==
          doctest::Approx((in.lambda + in.mu) * rep.n).epsilon(1e-12));
  }
}

TEST_CASE("published width coefficient falls below the current-free tau integral") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  crdm::FunctionalInputs in;
  in.lambda = 0.4;
  in.mu = 0.4;
  in.include_fd_tau = false;
  const auto rep = crdm::compute_functional_report(rho, crdm::kappa_zero(), in, gaussian_grid());
  CHECK(rep.bound_representability < rep.tau_analytic);
  CHECK(rep.sandwich.upper < rep.tau_analytic);
}

TEST_CASE("functional report is independent of the worker count") {
  const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  const auto kappa = crdm::kappa_rigid_rotation(Vec3(0, 0, 1));
  crdm::FunctionalInputs in;
  in.qs = {2.0, 3.0};
  in.lambda = 0.3;
  in.mu = 0.3;
  const auto grid = crdm::GridSpec::cube(Vec3::Zero(), 8.0, 20);
  const auto a = crdm::compute_functional_report(rho, kappa, in, grid, crdm::Execution{1});
  const auto b = crdm::compute_functional_report(rho, kappa, in, grid, crdm::Execution{4});
  CHECK(a.tau_analytic == b.tau_analytic);
  CHECK(*a.tau_fd == *b.tau_fd);
  CHECK(a.t_ab.sum == b.t_ab.sum);
  CHECK(a.norm_q.at(3.0).value == b.norm_q.at(3.0).value);
  CHECK(a.admissibility.at(2.0).lambda_min == b.admissibility.at(2.0).lambda_min);
}
