#include "crdm/observables.hpp"

#include <cmath>

#include "crdm/quadrature.hpp"

namespace crdm {

namespace {

constexpr double kDims = 3.0;

Vec3 unit(int a) {
  Vec3 e = Vec3::Zero();
  e[a] = 1.0;
  return e;
}

Vec3 central_current(const RdmKernel& kernel, const NodeSample& at, const Vec3& r, double h) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    const Complex plus = kernel.evaluate(kernel.sample(r + h * unit(a)), at);
    const Complex minus = kernel.evaluate(kernel.sample(r - h * unit(a)), at);
    out[a] = ((plus - minus) / (2.0 * h)).imag();
  }
  return out;
}

double central_mixed(const RdmKernel& kernel, const Vec3& r, double h) {
  double acc = 0.0;
  for (int a = 0; a < 3; ++a) {
    const NodeSample p = kernel.sample(r + h * unit(a));
    const NodeSample m = kernel.sample(r - h * unit(a));
    const Complex v = kernel.evaluate(p, p) - kernel.evaluate(p, m) - kernel.evaluate(m, p) +
                      kernel.evaluate(m, m);
    acc += v.real() / (4.0 * h * h);
  }
  return 0.5 * acc;
}

// |grad rho|^2 / (8 rho) with the floor and singularity conventions.
TauSample von_weizsaecker_density(const DensityProfile& rho, const Vec3& r, double value) {
  TauSample out;
  const auto grad = rho.gradient(r);
  if (!grad) {
    out.singular = true;
    return out;
  }
  const double g2 = grad->squaredNorm();
  if (value < kDensityFloor) {
    out.floored = true;
    out.singular = value == 0.0 && g2 > 0.0;
    return out;
  }
  out.value = g2 / (8.0 * value);
  return out;
}

}  // namespace

double diag_density(const RdmKernel& kernel, const Vec3& r) {
  const NodeSample s = kernel.sample(r);
  return kernel.evaluate(s, s).real();
}

CurrentEstimate extract_current_fd(const RdmKernel& kernel, const Vec3& r, double h,
                                   double smooth_tol) {
  if (!(h > 0.0)) throw ParameterError("extract_current_fd: step must be positive");
  const NodeSample at = kernel.sample(r);
  CurrentEstimate est;
  est.coarse = central_current(kernel, at, r, h);
  const Vec3 fine = central_current(kernel, at, r, 0.5 * h);
  est.value = (4.0 * fine - est.coarse) / 3.0;
  const double scale = std::max(1.0, est.value.norm());
  est.smooth = (fine - est.coarse).norm() <= smooth_tol * scale;
  return est;
}

Vec3 current_P_analytic(const DensityProfile& rho, const KappaField& kappa, const Vec3& r) {
  return rho(r) * (kappa(r) + kappa.jacobian(r) * r);
}

Vec3 current_Q_analytic(const DensityProfile& rho, const KappaField& kappa, const Vec3& r) {
  return -rho(r) * (kappa.jacobian(r) * r);
}

CurrentComparison compare_current_fd(const RdmKernel& kernel,
                                     const std::function<Vec3(const Vec3&)>& target,
                                     const GridSpec& grid, double h, const Execution& exec) {
  struct Acc {
    double diff = 0.0;
    double ref = 0.0;
    std::size_t rough = 0;
    std::size_t excluded = 0;
    Acc operator+(const Acc& o) const {
      return {diff + o.diff, ref + o.ref, rough + o.rough, excluded + o.excluded};
    }
  };
  const auto& rho = kernel.density();
  const Acc acc = reduce_grid<Acc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        Acc a;
        if (rho.near_cusp(r)) {
          a.excluded = 1;
          return a;
        }
        const CurrentEstimate est = extract_current_fd(kernel, r, h);
        const Vec3 t = target(r);
        a.diff = w * (est.value - t).squaredNorm();
        a.ref = w * t.squaredNorm();
        a.rough = est.smooth ? 0 : 1;
        return a;
      },
      exec);
  CurrentComparison out;
  out.abs_l2 = std::sqrt(acc.diff);
  out.rel_l2 = acc.ref > 0.0 ? std::sqrt(acc.diff / acc.ref) : out.abs_l2;
  out.rough_nodes = acc.rough;
  out.excluded_nodes = acc.excluded;
  return out;
}

TauSample tau_P(const DensityProfile& rho, const KappaField& kappa, double lambda, const Vec3& r) {
  const double value = rho(r);
  TauSample out = von_weizsaecker_density(rho, r, value);
  if (out.singular) return out;
  const Vec3 grad_phase = kappa(r) + kappa.jacobian(r) * r;
  out.value += 0.5 * grad_phase.squaredNorm() * value + kDims * lambda * value;
  return out;
}

TauSample tau_Q(const DensityProfile& rho, const KappaField& kappa, double mu, const Vec3& r) {
  const double value = rho(r);
  TauSample out = von_weizsaecker_density(rho, r, value);
  if (out.singular) return out;
  const Mat3 jac = kappa.jacobian(r);
  const Vec3 r_dot = jac * r;
  out.value += 0.5 * (r_dot.squaredNorm() + jac.squaredNorm() / (8.0 * mu)) * value +
               kDims * mu * value;
  return out;
}

TauSample tau_D(const DensityProfile& rho, const KappaField& kappa, double lambda, double mu,
                const Vec3& r, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ParameterError("tau_D: theta must lie in [0, 1]");
  const TauSample p = tau_P(rho, kappa, lambda, r);
  const TauSample q = tau_Q(rho, kappa, mu, r);
  TauSample out;
  out.singular = p.singular || q.singular;
  out.floored = p.floored || q.floored;
  out.value = theta * p.value + (1.0 - theta) * q.value;
  return out;
}

TauFdEstimate tau_fd(const RdmKernel& kernel, const Vec3& r, double h, double smooth_tol) {
  if (!(h > 0.0)) throw ParameterError("tau_fd: step must be positive");
  TauFdEstimate est;
  est.coarse = central_mixed(kernel, r, h);
  const double fine = central_mixed(kernel, r, 0.5 * h);
  est.value = (4.0 * fine - est.coarse) / 3.0;
  est.smooth = std::abs(fine - est.coarse) <= smooth_tol * std::max(1.0, std::abs(est.value));
  return est;
}

namespace {

struct ScalarAcc {
  double sum = 0.0;
  std::size_t floored = 0;
  std::size_t excluded = 0;
  ScalarAcc operator+(const ScalarAcc& o) const {
    return {sum + o.sum, floored + o.floored, excluded + o.excluded};
  }
};

FunctionalValue to_value(const ScalarAcc& acc) {
  return {acc.sum, acc.floored, acc.excluded};
}

}  // namespace

FunctionalValue functional_T_W(const DensityProfile& rho, const GridSpec& grid,
                               const Execution& exec) {
  return to_value(reduce_grid<ScalarAcc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        if (rho.near_cusp(r)) return ScalarAcc{0.0, 0, 1};
        const TauSample vw = von_weizsaecker_density(rho, r, rho(r));
        return ScalarAcc{w * vw.value, vw.floored ? 1u : 0u, vw.singular ? 1u : 0u};
      },
      exec));
}

FunctionalValue functional_T_p(const DensityProfile& rho, const KappaField& kappa,
                               const GridSpec& grid, const Execution& exec) {
  return to_value(reduce_grid<ScalarAcc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        return ScalarAcc{w * rho(r) * kappa(r).squaredNorm() / 8.0, 0, 0};
      },
      exec));
}

TabValue functional_T_ab(const DensityProfile& rho, const KappaField& kappa, const GridSpec& grid,
                         const Execution& exec) {
  struct Acc {
    Mat3 m = Mat3::Zero();
    Acc operator+(const Acc& o) const { return {m + o.m}; }
  };
  const Acc acc = reduce_grid<Acc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        const Mat3 j = kappa.jacobian(r);
        return Acc{(w * (1.0 + r.squaredNorm()) * rho(r)) * j.cwiseAbs2()};
      },
      exec);
  TabValue out;
  out.components = acc.m;
  out.sum = acc.m.sum();
  return out;
}

FunctionalValue vorticity_moment(const DensityProfile& rho, const KappaField& kappa,
                                 const GridSpec& grid, const Execution& exec) {
  return to_value(reduce_grid<ScalarAcc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        return ScalarAcc{
            w * (1.0 + r.squaredNorm()) * rho(r) * kappa.vorticity(r).squaredNorm(), 0, 0};
      },
      exec));
}

FunctionalValue tau_integral(const DensityProfile& rho, const KappaField& kappa, double lambda,
                             double mu, double theta, const GridSpec& grid,
                             const Execution& exec) {
  return to_value(reduce_grid<ScalarAcc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        if (rho.near_cusp(r)) return ScalarAcc{0.0, 0, 1};
        const TauSample t = tau_D(rho, kappa, lambda, mu, r, theta);
        return ScalarAcc{w * t.value, t.floored ? 1u : 0u, t.singular ? 1u : 0u};
      },
      exec));
}

FunctionalValue tau_integral_fd(const RdmKernel& kernel, const GridSpec& grid, double h,
                                const Execution& exec) {
  const auto& rho = kernel.density();
  return to_value(reduce_grid<ScalarAcc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        if (rho.near_cusp(r)) return ScalarAcc{0.0, 0, 1};
        return ScalarAcc{w * tau_fd(kernel, r, h).value, 0, 0};
      },
      exec));
}

JacobianMoments jacobian_moments(const DensityProfile& rho, const KappaField& kappa,
                                 const GridSpec& grid, const Execution& exec) {
  struct Acc {
    double plain = 0.0;
    double r2 = 0.0;
    Acc operator+(const Acc& o) const { return {plain + o.plain, r2 + o.r2}; }
  };
  const Acc acc = reduce_grid<Acc>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        const double base = w * rho(r) * kappa.jacobian(r).squaredNorm();
        return Acc{base, base * r.squaredNorm()};
      },
      exec);
  return {acc.plain, acc.r2};
}

double representability_bound(const BoundInputs& in) {
  return in.t_w + 4.0 * in.t_p + 0.5 * (in.lambda + in.mu) * in.n +
         0.75 * in.moments.r_squared + in.moments.plain / (32.0 * in.mu);
}

double representability_bound_corrected(const BoundInputs& in) {
  return in.t_w + 4.0 * in.t_p + 0.5 * kDims * (in.lambda + in.mu) * in.n +
         0.75 * in.moments.r_squared + in.moments.plain / (32.0 * in.mu);
}

Sandwich sandwich(const BoundInputs& in) {
  Sandwich s;
  s.lower = in.t_w + in.t_p;
  s.upper = in.t_w + 4.0 * in.t_p + (in.lambda + in.mu) * in.n + 1.5 * in.moments.r_squared +
            in.moments.plain / (16.0 * in.mu);
  return s;
}

FunctionalReport compute_functional_report(const DensityProfile& rho, const KappaField& kappa,
                                           const FunctionalInputs& inputs, const GridSpec& grid,
                                           const Execution& exec) {
  if (!(inputs.lambda > 0.0) || !(inputs.mu > 0.0)) {
    throw ParameterError("functional report needs positive lambda and mu");
  }
  FunctionalReport rep;
  rep.n = rho.declared_n();
  rep.lambda = inputs.lambda;
  rep.mu = inputs.mu;
  rep.theta = inputs.theta;
  rep.occ_max = inputs.occ_max;
  rep.grid = grid.describe();

  rep.n_quadrature = integrate_box<double>([&](const Vec3& r) { return rho(r); }, grid, exec);
  for (double q : inputs.qs) {
    rep.norm_q[q] = lp_norm(rho, q, grid, exec);
    if (q > 1.0) {
      rep.admissibility[q] = admissible_lambda(rep.n, rep.norm_q[q].value, q, inputs.occ_max);
    }
  }
  const FunctionalValue tw = functional_T_W(rho, grid, exec);
  rep.t_w = tw.value;
  rep.floored_nodes = tw.floored_nodes;
  rep.excluded_nodes = tw.excluded_nodes;
  rep.t_p = functional_T_p(rho, kappa, grid, exec).value;
  rep.t_ab = functional_T_ab(rho, kappa, grid, exec);
  rep.vorticity_moment = vorticity_moment(rho, kappa, grid, exec).value;
  rep.tau_analytic =
      tau_integral(rho, kappa, inputs.lambda, inputs.mu, inputs.theta, grid, exec).value;
  if (inputs.include_fd_tau) {
    const RdmKernel kernel =
        kernel_D(rho, kappa, inputs.lambda, inputs.mu, inputs.theta, inputs.occ_max);
    rep.tau_fd = tau_integral_fd(kernel, grid, inputs.fd_step, exec).value;
  }
  rep.moments = jacobian_moments(rho, kappa, grid, exec);
  const BoundInputs b{rep.t_w, rep.t_p, rep.n, inputs.lambda, inputs.mu, rep.moments};
  rep.bound_representability = representability_bound(b);
  rep.bound_representability_corrected = representability_bound_corrected(b);
  rep.sandwich = sandwich(b);
  return rep;
}

}  // namespace crdm
