#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crdm/grid.hpp"
#include "crdm/kernels.hpp"

namespace crdm {

inline constexpr std::size_t kDefaultDenseLimit = 4096;

/// Raised when a dense discretisation would exceed the configured node limit.
class DenseLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nystrom matrix M_ij = sqrt(w_i w_j) K(r_i, r_j).
struct DiscretizedOperator {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  Eigen::MatrixXcd matrix;
  std::string kernel_label;
  std::string grid_label;

  /// ||M - M^H||_F / ||M||_F.
  double hermiticity_residual() const;
};

DiscretizedOperator discretize(const RdmKernel& kernel, const GridSpec& grid,
                               std::size_t dense_limit = kDefaultDenseLimit,
                               const Execution& exec = {});

struct SpectrumTolerances {
  double negative_rel = 1e-8;   // min eig >= -negative_rel * ||M||
  double occupation_rel = 1e-4;  // max eig <= occ_max (1 + occupation_rel)
  double trace_rel = 0.02;       // |sum eig - N| <= trace_rel * N
  double bound_rel = 1e-4;       // grid slack on the Holder eigenvalue bound
};

struct SpectrumInputs {
  double n = 0.0;
  int occ_max = 2;
  /// Holder bound on the squared top occupation, see eigen_square_bound.
  std::optional<double> square_bound;
  SpectrumTolerances tol;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;  // descending
  double trace_estimate = 0.0;      // real part of the matrix trace
  double eigen_sum = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double operator_norm = 0.0;
  double n = 0.0;
  int occ_max = 2;
  std::optional<double> square_bound;
  SpectrumTolerances tol;

  bool positive_ok = false;
  bool occupation_ok = false;
  bool trace_ok = false;
  /// max eig <= bound (the literal comparison) and max eig^2 <= bound.
  std::optional<bool> bound_ok;
  std::optional<bool> square_bound_ok;
};

SpectrumReport eigen_dense(const DiscretizedOperator& op, const SpectrumInputs& inputs);

/// N ||rho||_q (pi / (2 p lambda))^{3/(2p)}: bound on the square of any
/// occupation of P_lambda or Q_lambda, independent of the current.
double eigen_square_bound(double n, double norm_q, double p, double lambda);

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Dominant Nystrom eigenvalue by power iteration with kernel entries
/// evaluated on the fly. Start vector is all-ones.
PowerIterationResult top_eigenvalue_matfree(const RdmKernel& kernel, const GridSpec& grid,
                                            int max_iterations = 500, double tol = 1e-12,
                                            const Execution& exec = {});

/// sum_i w_i K(r_i, r_i).
double trace_via_diag(const RdmKernel& kernel, const GridSpec& grid, const Execution& exec = {});

}  // namespace crdm
