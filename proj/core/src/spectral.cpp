#include "crdm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "crdm/quadrature.hpp"

namespace crdm {

double DiscretizedOperator::hermiticity_residual() const {
  const double norm = matrix.norm();
  if (norm == 0.0) return 0.0;
  return (matrix - matrix.adjoint()).norm() / norm;
}

DiscretizedOperator discretize(const RdmKernel& kernel, const GridSpec& grid,
                               std::size_t dense_limit, const Execution& exec) {
  const std::size_t n = grid.size();
  if (n > dense_limit) {
    std::ostringstream os;
    os << "grid has " << n << " nodes, above the dense limit of " << dense_limit
       << "; use top_eigenvalue_matfree instead";
    throw DenseLimitError(os.str());
  }
  DiscretizedOperator op;
  op.kernel_label = kernel.label();
  op.grid_label = grid.describe();
  op.nodes.reserve(n);
  op.weights.reserve(n);
  std::vector<NodeSample> samples;
  samples.reserve(n);
  std::vector<double> sqrt_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.nodes.push_back(grid.node(i));
    op.weights.push_back(grid.weight(i));
    samples.push_back(kernel.sample(op.nodes.back()));
    sqrt_w[i] = std::sqrt(op.weights.back());
  }
  op.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // Lower triangle from the kernel, upper triangle by conjugation.
  parallel_for(n, exec, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        op.matrix(i, j) = sqrt_w[i] * sqrt_w[j] * kernel.evaluate(samples[i], samples[j]);
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    op.matrix(i, i) = op.matrix(i, i).real();
    for (std::size_t j = 0; j < i; ++j) op.matrix(j, i) = std::conj(op.matrix(i, j));
  }
  return op;
}

double eigen_square_bound(double n, double norm_q, double p, double lambda) {
  if (!(lambda > 0.0) || !(p >= 1.0)) throw ParameterError("eigen_square_bound: bad arguments");
  return n * norm_q * std::pow(kPi / (2.0 * p * lambda), 3.0 / (2.0 * p));
}

SpectrumReport eigen_dense(const DiscretizedOperator& op, const SpectrumInputs& inputs) {
  validate_occ_max(inputs.occ_max);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "dense eigensolver did not converge for " << op.kernel_label << " on " << op.grid_label
       << " (||M||_F = " << op.matrix.norm()
       << ", hermiticity residual = " << op.hermiticity_residual() << ")";
    throw std::runtime_error(os.str());
  }
  SpectrumReport rep;
  const auto& ev = solver.eigenvalues();
  rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), std::greater<>());
  rep.trace_estimate = op.matrix.diagonal().real().sum();
  rep.eigen_sum = pairwise_sum(std::span<const double>(rep.eigenvalues));
  rep.max_eigenvalue = rep.eigenvalues.front();
  rep.min_eigenvalue = rep.eigenvalues.back();
  rep.operator_norm = std::max(std::abs(rep.max_eigenvalue), std::abs(rep.min_eigenvalue));
  rep.n = inputs.n;
  rep.occ_max = inputs.occ_max;
  rep.square_bound = inputs.square_bound;
  rep.tol = inputs.tol;

  rep.positive_ok = rep.min_eigenvalue >= -inputs.tol.negative_rel * rep.operator_norm;
  rep.occupation_ok = rep.max_eigenvalue <= inputs.occ_max * (1.0 + inputs.tol.occupation_rel);
  rep.trace_ok = std::abs(rep.eigen_sum - inputs.n) <= inputs.tol.trace_rel * inputs.n;
  if (inputs.square_bound) {
    const double slack = *inputs.square_bound * inputs.tol.bound_rel;
    rep.bound_ok = rep.max_eigenvalue <= *inputs.square_bound + slack;
    rep.square_bound_ok = rep.max_eigenvalue * rep.max_eigenvalue <= *inputs.square_bound + slack;
  }
  return rep;
}

PowerIterationResult top_eigenvalue_matfree(const RdmKernel& kernel, const GridSpec& grid,
                                            int max_iterations, double tol,
                                            const Execution& exec) {
  const std::size_t n = grid.size();
  std::vector<NodeSample> samples(n);
  std::vector<double> sqrt_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = kernel.sample(grid.node(i));
    sqrt_w[i] = std::sqrt(grid.weight(i));
  }
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(n));
  x /= x.norm();
  Eigen::VectorXcd y(x.size());

  PowerIterationResult result;
  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    parallel_for(n, exec, [&](std::size_t begin, std::size_t end) {
      std::vector<Complex> row(n);
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          row[j] = sqrt_w[i] * sqrt_w[j] * kernel.evaluate(samples[i], samples[j]) * x[j];
        }
        y[i] = pairwise_sum(std::span<const Complex>(row));
      }
    });
    const double rayleigh = x.dot(y).real();  // x normalised
    result.value = rayleigh;
    result.iterations = it;
    const double norm = y.norm();
    if (norm == 0.0) {
      result.converged = true;
      break;
    }
    x = y / norm;
    if (it > 1 && std::abs(rayleigh - previous) <= tol * std::max(1.0, std::abs(rayleigh))) {
      result.converged = true;
      break;
    }
    previous = rayleigh;
  }
  return result;
}

double trace_via_diag(const RdmKernel& kernel, const GridSpec& grid, const Execution& exec) {
  return reduce_grid<double>(
      grid,
      [&](std::size_t, const Vec3& r, double w) {
        const NodeSample s = kernel.sample(r);
        return w * kernel.evaluate(s, s).real();
      },
      exec);
}

}  // namespace crdm
