#pragma once

#include "dwarp/config.hpp"

#include <nlohmann/json.hpp>

namespace dwarp {

/// Result of one orchestrated run. The JSON rendering is deterministic for a
/// fixed (config, seed): wall-clock timings are kept out of report.json and
/// go to a timings sidecar instead.
struct RunReport {
  nlohmann::ordered_json report;                      // config echo + suite reports
  bool overall_pass = false;
  std::vector<std::pair<std::string, double>> wall_clock_seconds;

  std::string to_json_string() const { return report.dump(2) + "\n"; }
};

/// Executes the configured suites, writes report.json and per-suite CSVs
/// under config.out_dir (created if missing), and returns the report.
/// Numerical failures are recorded in the report; configuration problems
/// throw ConfigError.
RunReport run(const RunConfig& config);

/// Identity convergence study across config.grids on the deterministic
/// sine-mode graph; returns per-identity reports with order estimates.
nlohmann::ordered_json refine_study(const RunConfig& config);

} // namespace dwarp
