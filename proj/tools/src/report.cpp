#include "crdm_app/report.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <stdexcept>

namespace crdm_app {

namespace {

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Check check_le(std::string name, double value, double tolerance, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tolerance;
  c.relation = "<=";
  c.passed = value <= tolerance;
  c.note = std::move(note);
  return c;
}

Check check_ge(std::string name, double value, double tolerance, std::string note) {
  Check c = check_le(std::move(name), value, tolerance, std::move(note));
  c.relation = ">=";
  c.passed = value >= tolerance;
  return c;
}

Check check_true(std::string name, bool ok, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = ok ? 1.0 : 0.0;
  c.tolerance = 1.0;
  c.relation = "true";
  c.passed = ok;
  c.note = std::move(note);
  return c;
}

RunReport::RunReport(std::string command) : command_(std::move(command)) {}

bool RunReport::passed() const {
  for (const auto& c : checks_) {
    if (c.gating && !c.passed) return false;
  }
  return true;
}

std::vector<std::string> RunReport::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& c : checks_) {
    if (c.gating && !c.passed) out.push_back(c.name);
  }
  return out;
}

std::string RunReport::dump(std::optional<std::string> timestamp) const {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = command_;
  if (timestamp) j["timestamp"] = *timestamp;
  j["config"] = config_;
  j["values"] = values_;
  for (const auto& [k, v] : sections_.items()) j[k] = v;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks_) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["value"] = number_or_null(c.value);
    e["tolerance"] = number_or_null(c.tolerance);
    e["relation"] = c.relation;
    e["gating"] = c.gating;
    if (c.expected_failure) e["expected_failure"] = true;
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(std::move(e));
  }
  j["passed"] = passed();
  j["failed_checks"] = failed_checks();
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string write_new_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path base(path);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  for (int k = 0; k < 100000; ++k) {
    fs::path candidate = base;
    if (k > 0) {
      candidate = base.parent_path() /
                  (base.stem().string() + "." + std::to_string(k) + base.extension().string());
    }
    // "x" makes the open fail instead of truncating an existing file.
    std::FILE* f = std::fopen(candidate.c_str(), "wx");
    if (!f) {
      if (errno == EEXIST) continue;
      throw std::runtime_error("cannot create '" + candidate.string() + "'");
    }
    const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
    std::fclose(f);
    if (!ok) throw std::runtime_error("short write to '" + candidate.string() + "'");
    return candidate.string();
  }
  throw std::runtime_error("no free file name next to '" + path + "'");
}

}  // namespace crdm_app
