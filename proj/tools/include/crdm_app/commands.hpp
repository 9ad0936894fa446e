#pragma once

#include <map>
#include <string>
#include <vector>

#include <crdm/crdm.hpp>

#include "crdm_app/config.hpp"
#include "crdm_app/report.hpp"

namespace crdm_app {

/// Tolerances of the gating checks. They are copied into every report entry.
struct Tolerances {
  double diagonal = 1e-12;          // max |D(r,r) - rho(r)| / max rho
  double trace_diag = 1e-6;         // |sum w D(r,r) - N| / N
  double hermiticity = 1e-14;       // |K(r,s) - conj K(s,r)| / (1 + |K|)
  double current_fd = 1e-6;         // grid-L2 relative, FD current of D vs rho kappa / 2
  double current_analytic = 1e-12;  // pointwise, relative to max rho
  double current_p_rigid = 1e-8;    // grid-L2 absolute, current of P for rigid rotation
  double current_q_rigid = 1e-6;    // grid-L2 relative, current of Q vs rho kappa
  double factorization = 1e-8;      // residual at the highest Gauss-Hermite order
  double tau_fd = 1e-6;             // pointwise relative, FD tau vs closed form
  double tau_mixture = 1e-14;       // relative, tau_D vs theta tau_P + (1-theta) tau_Q
  double tau_identity = 1e-6;       // relative, current-free integral identity
  double tau_integral_fd = 1e-6;    // relative, FD tau integral vs closed-form integral
  double averaging_final = 1e-4;    // final averaging error / rho(x)
  double matfree = 1e-6;            // |power iteration - dense top eigenvalue|
  double fd_slope = 1.9;            // minimum observed order on the step ladder
};

/// Objects derived from a RunConfig.
struct Setup {
  RunConfig cfg;
  Tolerances tol;
  crdm::DensityProfile rho;
  crdm::KappaField kappa;
  crdm::Execution exec;
  crdm::GridSpec functional_grid;
  crdm::GridSpec trace_grid;
  crdm::GridSpec spectral_grid;
  crdm::GridSpec current_grid;
  crdm::GridSpec sample_grid;
  std::map<double, crdm::NormEstimate> norms;
  std::map<double, crdm::Admissibility> admissibility;
  double lambda = 0.0;
  double mu = 0.0;
  bool lambda_auto = false;
  bool mu_auto = false;
};

/// Builds fields, grids and kernel widths. Throws ConfigError when the
/// configuration cannot be realised.
Setup make_setup(const RunConfig& cfg);

/// Echo of the fully resolved configuration, defaults included.
nlohmann::ordered_json config_echo(const RunConfig& cfg);

RunReport run_construct(const Setup& s);
RunReport run_functionals(const Setup& s);
RunReport run_spectrum(const Setup& s);
RunReport run_verify(const Setup& s);
RunReport run_convergence(const Setup& s);

const std::vector<std::string>& command_names();
RunReport run_command(const std::string& name, const Setup& s);

}  // namespace crdm_app
