#include "dwarp/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

// Exit codes: 0 pass, 1 numerical failure, 2 configuration error.
constexpr int kExitPass = 0;
constexpr int kExitNumericalFailure = 1;
constexpr int kExitConfigError = 2;

void apply_overrides(dwarp::RunConfig& config, std::uint64_t seed, const std::string& out,
                     const std::vector<int>& grids, const std::vector<std::string>& suites) {
  if (seed != 0) config.seed = seed;
  if (!out.empty()) config.out_dir = out;
  if (!grids.empty()) config.grids = grids;
  if (!suites.empty()) config.suites = suites;
  config.validate();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"dwarp: numerical geometry of doubly warped product spacetimes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<int> grids;
  std::vector<std::string> suites;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    auto* opt = cmd->add_option("--config", config_path, "run configuration file");
    if (need_config) opt->required();
    cmd->add_option("--seed", seed, "override the master seed");
    cmd->add_option("--out", out_dir, "override the output directory");
    cmd->add_option("--grid", grids, "override grid sizes")->delimiter(',');
    cmd->add_option("--suite", suites, "override the suite list")->delimiter(',');
  };

  CLI::App* cmd_run = app.add_subcommand("run", "execute the configured check suites");
  add_common(cmd_run, true);

  CLI::App* cmd_list = app.add_subcommand("list-presets", "print the preset catalog");

  CLI::App* cmd_refine =
      app.add_subcommand("refine", "identity convergence study across the grid list");
  add_common(cmd_refine, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (cmd_list->parsed()) {
      std::cout << dwarp::list_presets_text();
      return kExitPass;
    }

    dwarp::RunConfig config = dwarp::RunConfig::from_file(config_path);
    apply_overrides(config, seed, out_dir, grids, suites);

    if (cmd_refine->parsed()) {
      const auto study = dwarp::refine_study(config);
      std::cout << study.dump(2) << "\n";
      bool pass = true;
      for (const auto& entry : study) {
        for (const auto& report : entry["grids"]) {
          pass = pass && report["passed"].get<bool>();
        }
      }
      return pass ? kExitPass : kExitNumericalFailure;
    }

    const dwarp::RunReport report = dwarp::run(config);
    for (const auto& [suite, seconds] : report.wall_clock_seconds) {
      std::cerr << suite << ": " << seconds << " s\n";
    }
    std::cout << (report.overall_pass ? "PASS" : "FAIL") << "  report written to "
              << config.out_dir << "/report.json\n";
    return report.overall_pass ? kExitPass : kExitNumericalFailure;
  } catch (const dwarp::ConfigError& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitNumericalFailure;
  }
}
