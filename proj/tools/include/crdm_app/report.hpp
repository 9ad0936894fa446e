#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace crdm_app {

inline constexpr const char* kReportSchema = "crdm.report/1";

/// One pass/fail verdict. Every check records the measured value, the
/// tolerance it was compared against and the relation used.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=", ">=", "true", "fails"
  /// Non-gating checks are reported but do not affect the exit code.
  bool gating = true;
  /// Set when the check is an expected failure (sub-threshold demonstrations);
  /// passed then means "failed as expected".
  bool expected_failure = false;
  std::string note;
};

Check check_le(std::string name, double value, double tolerance, std::string note = {});
Check check_ge(std::string name, double value, double tolerance, std::string note = {});
Check check_true(std::string name, bool ok, std::string note = {});

class RunReport {
 public:
  explicit RunReport(std::string command);

  nlohmann::ordered_json& config() { return config_; }
  nlohmann::ordered_json& values() { return values_; }
  const nlohmann::ordered_json& values() const { return values_; }
  nlohmann::ordered_json& section(const std::string& name) { return sections_[name]; }
  const nlohmann::ordered_json& section(const std::string& name) const {
    return sections_.at(name);
  }
  void add(Check c) { checks_.push_back(std::move(c)); }
  const std::vector<Check>& checks() const { return checks_; }

  bool passed() const;
  std::vector<std::string> failed_checks() const;
  /// Deterministic serialisation; `timestamp` adds the only varying field.
  std::string dump(std::optional<std::string> timestamp) const;

 private:
  std::string command_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json values_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json sections_ = nlohmann::ordered_json::object();
  std::vector<Check> checks_;
};

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Writes `content` to `path` without touching existing files: when `path`
/// exists, the first free `stem.N.ext` is used instead. Returns the path written.
std::string write_new_file(const std::string& path, const std::string& content);

}  // namespace crdm_app
