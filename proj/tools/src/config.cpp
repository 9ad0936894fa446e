#include "crdm_app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace crdm_app {

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

std::size_t to_count(const std::string& key, const std::string& text, std::size_t min) {
  const long long v = to_integer(key, text);
  if (v < static_cast<long long>(min)) {
    throw ConfigError(key, "must be at least " + std::to_string(min));
  }
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& w : split_words(text)) out.push_back(to_double(key, w));
  if (out.empty()) throw ConfigError(key, "expected at least one number");
  return out;
}

crdm::Vec3 to_vec3(const std::string& key, const std::string& text) {
  const auto v = to_doubles(key, text);
  if (v.size() != 3) throw ConfigError(key, "expected three numbers");
  return {v[0], v[1], v[2]};
}

std::optional<double> to_auto_double(const std::string& key, const std::string& text) {
  if (trim(text) == "auto") return std::nullopt;
  return to_double(key, text);
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"density",
       {
           {"preset", [](RunConfig& c, const std::string& v) { c.density.preset = trim(v); }},
           {"N", [](RunConfig& c, const std::string& v) { c.density.n = to_double("density.N", v); }},
           {"alpha",
            [](RunConfig& c, const std::string& v) { c.density.alpha = to_double("density.alpha", v); }},
           {"zeta",
            [](RunConfig& c, const std::string& v) { c.density.zeta = to_double("density.zeta", v); }},
           {"center",
            [](RunConfig& c, const std::string& v) { c.density.center = to_vec3("density.center", v); }},
       }},
      {"kappa",
       {
           {"preset", [](RunConfig& c, const std::string& v) { c.kappa.preset = trim(v); }},
           {"omega",
            [](RunConfig& c, const std::string& v) { c.kappa.omega = to_vec3("kappa.omega", v); }},
           {"value",
            [](RunConfig& c, const std::string& v) { c.kappa.value = to_vec3("kappa.value", v); }},
           {"A",
            [](RunConfig& c, const std::string& v) {
              const auto m = to_doubles("kappa.A", v);
              if (m.size() != 9) throw ConfigError("kappa.A", "expected nine numbers (row major)");
              for (int i = 0; i < 9; ++i) c.kappa.a(i / 3, i % 3) = m[i];
            }},
       }},
      {"kernel",
       {
           {"q", [](RunConfig& c, const std::string& v) { c.kernel.qs = to_doubles("kernel.q", v); }},
           {"lambda",
            [](RunConfig& c, const std::string& v) {
              c.kernel.lambda = to_auto_double("kernel.lambda", v);
            }},
           {"mu",
            [](RunConfig& c, const std::string& v) { c.kernel.mu = to_auto_double("kernel.mu", v); }},
           {"lambda_scale",
            [](RunConfig& c, const std::string& v) {
              c.kernel.lambda_scale = to_double("kernel.lambda_scale", v);
            }},
           {"theta",
            [](RunConfig& c, const std::string& v) { c.kernel.theta = to_double("kernel.theta", v); }},
           {"occ_max",
            [](RunConfig& c, const std::string& v) {
              c.kernel.occ_max = static_cast<int>(to_integer("kernel.occ_max", v));
            }},
       }},
      {"grid",
       {
           {"half_width",
            [](RunConfig& c, const std::string& v) {
              c.grid.half_width = to_auto_double("grid.half_width", v);
            }},
           {"count",
            [](RunConfig& c, const std::string& v) { c.grid.count = to_count("grid.count", v, 2); }},
           {"trace_count",
            [](RunConfig& c, const std::string& v) {
              c.grid.trace_count = to_count("grid.trace_count", v, 0);
            }},
           {"spectral_half_width",
            [](RunConfig& c, const std::string& v) {
              c.grid.spectral_half_width = to_auto_double("grid.spectral_half_width", v);
            }},
           {"spectral_count",
            [](RunConfig& c, const std::string& v) {
              c.grid.spectral_count = to_count("grid.spectral_count", v, 2);
            }},
           {"current_count",
            [](RunConfig& c, const std::string& v) {
              c.grid.current_count = to_count("grid.current_count", v, 2);
            }},
           {"sample_count",
            [](RunConfig& c, const std::string& v) {
              c.grid.sample_count = to_count("grid.sample_count", v, 2);
            }},
           {"dense_limit",
            [](RunConfig& c, const std::string& v) {
              c.grid.dense_limit = to_count("grid.dense_limit", v, 1);
            }},
           {"workers",
            [](RunConfig& c, const std::string& v) {
              c.grid.workers = static_cast<unsigned>(to_count("grid.workers", v, 1));
            }},
       }},
      {"fd",
       {
           {"step", [](RunConfig& c, const std::string& v) { c.fd.step = to_double("fd.step", v); }},
           {"ladder",
            [](RunConfig& c, const std::string& v) { c.fd.ladder = to_doubles("fd.ladder", v); }},
           {"tau_points",
            [](RunConfig& c, const std::string& v) {
              c.fd.tau_points = to_count("fd.tau_points", v, 1);
            }},
       }},
      {"factorization",
       {
           {"orders",
            [](RunConfig& c, const std::string& v) {
              c.factorization.orders.clear();
              for (const auto& w : split_words(v)) {
                c.factorization.orders.push_back(
                    static_cast<int>(to_integer("factorization.orders", w)));
              }
            }},
           {"pairs",
            [](RunConfig& c, const std::string& v) {
              c.factorization.pairs = to_count("factorization.pairs", v, 1);
            }},
           {"seed",
            [](RunConfig& c, const std::string& v) {
              c.factorization.seed =
                  static_cast<std::uint64_t>(to_count("factorization.seed", v, 0));
            }},
           {"max_separation",
            [](RunConfig& c, const std::string& v) {
              c.factorization.max_separation = to_double("factorization.max_separation", v);
            }},
       }},
      {"probes",
       {
           {"spectral_dense",
            [](RunConfig& c, const std::string& v) {
              c.probes.spectral_dense = to_bool("probes.spectral_dense", v);
            }},
           {"spectral_matfree",
            [](RunConfig& c, const std::string& v) {
              c.probes.spectral_matfree = to_bool("probes.spectral_matfree", v);
            }},
           {"measure",
            [](RunConfig& c, const std::string& v) { c.probes.measure = to_bool("probes.measure", v); }},
           {"measure_points",
            [](RunConfig& c, const std::string& v) {
              c.probes.measure_points = to_count("probes.measure_points", v, 1);
            }},
           {"measure_subdivisions",
            [](RunConfig& c, const std::string& v) {
              c.probes.measure_subdivisions =
                  static_cast<int>(to_count("probes.measure_subdivisions", v, 1));
            }},
           {"measure_gh_order",
            [](RunConfig& c, const std::string& v) {
              c.probes.measure_gh_order = static_cast<int>(to_count("probes.measure_gh_order", v, 2));
            }},
           {"expect_occupation_failure",
            [](RunConfig& c, const std::string& v) {
              c.probes.expect_occupation_failure = to_bool("probes.expect_occupation_failure", v);
            }},
       }},
      {"output",
       {
           {"kernel_csv", [](RunConfig& c, const std::string& v) { c.output.kernel_csv = trim(v); }},
           {"spectrum_csv",
            [](RunConfig& c, const std::string& v) { c.output.spectrum_csv = trim(v); }},
           {"averaging_csv",
            [](RunConfig& c, const std::string& v) { c.output.averaging_csv = trim(v); }},
       }},
  };
  return table;
}

void validate(const RunConfig& c) {
  if (c.density.preset != "gaussian" && c.density.preset != "exponential") {
    throw ConfigError("density.preset", "unknown preset '" + c.density.preset +
                                            "' (gaussian, exponential)");
  }
  require_positive("density.N", c.density.n);
  require_positive("density.alpha", c.density.alpha);
  require_positive("density.zeta", c.density.zeta);
  static const std::vector<std::string> kappas{"zero", "constant", "rigid_rotation",
                                               "quadratic_gauge"};
  if (std::find(kappas.begin(), kappas.end(), c.kappa.preset) == kappas.end()) {
    throw ConfigError("kappa.preset", "unknown preset '" + c.kappa.preset +
                                          "' (zero, constant, rigid_rotation, quadratic_gauge)");
  }
  for (double q : c.kernel.qs) {
    if (!(q > 1.0)) throw ConfigError("kernel.q", "every q must exceed 1");
  }
  if (c.kernel.lambda) require_positive("kernel.lambda", *c.kernel.lambda);
  if (c.kernel.mu) require_positive("kernel.mu", *c.kernel.mu);
  require_positive("kernel.lambda_scale", c.kernel.lambda_scale);
  if (!(c.kernel.theta >= 0.0 && c.kernel.theta <= 1.0)) {
    throw ConfigError("kernel.theta", "must lie in [0, 1]");
  }
  if (c.kernel.occ_max != 1 && c.kernel.occ_max != 2) {
    throw ConfigError("kernel.occ_max", "must be 1 or 2");
  }
  if (c.grid.trace_count == 1) throw ConfigError("grid.trace_count", "must be 0 or at least 2");
  if (c.grid.half_width) require_positive("grid.half_width", *c.grid.half_width);
  if (c.grid.spectral_half_width) {
    require_positive("grid.spectral_half_width", *c.grid.spectral_half_width);
  }
  require_positive("fd.step", c.fd.step);
  if (c.fd.ladder.size() < 2) throw ConfigError("fd.ladder", "needs at least two steps");
  for (std::size_t i = 0; i < c.fd.ladder.size(); ++i) {
    require_positive("fd.ladder", c.fd.ladder[i]);
    if (i > 0 && !(c.fd.ladder[i] < c.fd.ladder[i - 1])) {
      throw ConfigError("fd.ladder", "steps must decrease");
    }
  }
  if (c.factorization.orders.empty()) {
    throw ConfigError("factorization.orders", "needs at least one order");
  }
  for (int o : c.factorization.orders) {
    if (o < 8 || o > 64) throw ConfigError("factorization.orders", "orders must lie in [8, 64]");
  }
  require_positive("factorization.max_separation", c.factorization.max_separation);
}

RunConfig from_ptree(const boost::property_tree::ptree& tree, std::string source) {
  RunConfig cfg;
  cfg.source = std::move(source);
  const auto& table = schema();
  for (const auto& [section, body] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end()) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError(section, "keys must live inside a [section]");
      }
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, leaf] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ConfigError(section + "." + key, "unknown key");
      it->second(cfg, leaf.data());
    }
  }
  validate(cfg);
  return cfg;
}

}  // namespace

RunConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  return from_ptree(tree, "<string>");
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_config_string(buf.str());
  cfg.source = path;
  return cfg;
}

}  // namespace crdm_app
