#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "crdm_app/commands.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct and verify current-carrying one-particle density matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "crdm 0.3.0");

  std::string config_path;
  std::string out_path;
  bool no_timestamp = false;
  const char* help[] = {
      "Build kernels, report admissible widths and write kernel samples",
      "Run the full invariant suite",
      "Dense (and optionally matrix-free) spectra of P, Q and D",
      "Kinetic-energy functionals, tau integrals and bounds",
      "Finite-difference, grid and quadrature-order refinement ladders",
  };
  const auto& names = crdm_app::command_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("config", config_path, "INI run configuration")->required();
    sub->add_option("--out", out_path, "Report path; existing files are never overwritten");
    sub->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp field from the report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  crdm_app::Setup setup = [&] {
    try {
      return crdm_app::make_setup(crdm_app::parse_config_file(config_path));
    } catch (const crdm_app::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      std::exit(kExitConfigError);
    } catch (const crdm::ParameterError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      std::exit(kExitConfigError);
    }
  }();

  crdm_app::RunReport report("");
  try {
    report = crdm_app::run_command(command, setup);
  } catch (const crdm::DenseLimitError& e) {
    std::cerr << "config error: grid.spectral_count: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const crdm::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }

  const std::string text =
      report.dump(no_timestamp ? std::nullopt : std::optional<std::string>(crdm_app::utc_timestamp()));
  if (out_path.empty()) {
    std::cout << text;
  } else {
    try {
      std::cerr << "wrote " << crdm_app::write_new_file(out_path, text) << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitCheckFailure;
    }
  }

  for (const auto& c : report.checks()) {
    std::cerr << (c.passed ? "PASS " : (c.gating ? "FAIL " : "info ")) << c.name << "  value="
              << c.value << " " << c.relation << " " << c.tolerance << '\n';
  }
  if (!report.passed()) {
    std::cerr << "failed checks:";
    for (const auto& name : report.failed_checks()) std::cerr << ' ' << name;
    std::cerr << '\n';
    return kExitCheckFailure;
  }
  return kExitPass;
}
