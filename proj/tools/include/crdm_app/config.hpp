#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <crdm/crdm.hpp>

namespace crdm_app {

/// Invalid or incomplete configuration. key() names the offending
/// `section.key`, or is empty for file-level problems.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct DensityConfig {
  std::string preset = "gaussian";  // gaussian | exponential
  double n = 1.0;
  double alpha = 1.0;
  double zeta = 1.0;
  crdm::Vec3 center = crdm::Vec3::Zero();
};

struct KappaConfig {
  std::string preset = "rigid_rotation";  // zero | constant | rigid_rotation | quadratic_gauge
  crdm::Vec3 omega{0.0, 0.0, 0.5};
  crdm::Vec3 value = crdm::Vec3::Zero();
  crdm::Mat3 a = crdm::Mat3::Identity();
};

struct KernelConfig {
  std::vector<double> qs{2.0};
  std::optional<double> lambda;  // empty: auto
  std::optional<double> mu;      // empty: auto
  double lambda_scale = 1.0;     // applied to auto values only
  double theta = 0.5;
  int occ_max = 2;
};

struct GridConfig {
  std::optional<double> half_width;           // empty: density support
  std::size_t count = 48;
  std::size_t trace_count = 0;  // 0: same as count
  std::optional<double> spectral_half_width;  // empty: half the support
  std::size_t spectral_count = 12;
  std::size_t current_count = 12;
  std::size_t sample_count = 17;
  std::size_t dense_limit = crdm::kDefaultDenseLimit;
  unsigned workers = 1;
};

struct FdConfig {
  double step = crdm::kDefaultFdStep;
  std::vector<double> ladder{1e-2, 5e-3, 2.5e-3};
  std::size_t tau_points = 100;
};

struct FactorizationConfig {
  std::vector<int> orders{8, 16, 32};
  std::size_t pairs = 64;
  std::uint64_t seed = 20240601;
  double max_separation = 1.5;
};

struct ProbeConfig {
  bool spectral_dense = true;
  bool spectral_matfree = false;
  bool measure = true;
  std::size_t measure_points = 5;
  int measure_subdivisions = 4;
  int measure_gh_order = 8;
  bool expect_occupation_failure = false;
};

struct OutputConfig {
  std::string kernel_csv;
  std::string spectrum_csv;
  std::string averaging_csv;
};

/// Fully specified run. Every field has a documented default.
struct RunConfig {
  DensityConfig density;
  KappaConfig kappa;
  KernelConfig kernel;
  GridConfig grid;
  FdConfig fd;
  FactorizationConfig factorization;
  ProbeConfig probes;
  OutputConfig output;
  std::string source;  // file path, or "<string>"
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_string(const std::string& text);

}  // namespace crdm_app
