#pragma once

#include "dwarp/spacetime.hpp"

#include <map>

namespace dwarp {

/// Run configuration parsed from a flat key = value text file (# comments).
/// Unknown keys, unresolvable presets, and out-of-range values raise
/// ConfigError with the offending field in the message.
struct RunConfig {
  // model
  std::string base_kind = "circle";
  double base_radius = 1.0;
  double base_period0 = 2.0 * EIGEN_PI;
  double base_period1 = 2.0 * EIGEN_PI;
  double base_half_width = 6.0;

  std::string rho_kind = "constant";
  double rho_value = 1.0;
  double rho_rate = 1.0;
  std::vector<double> rho_coeffs{1.0};

  std::string h_kind = "constant";
  double h_value = 1.0;
  double h_offset = 2.0;
  double h_amplitude = 1.0;
  int h_axis = 0;
  double h_rate = 1.0;
  double h_power = 0.25;

  double t_min = -1.0;
  double t_max = 1.0;
  std::string monotone = "auto"; // auto | true | false

  // run
  std::vector<int> grids{64};
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  int trials = 20;
  std::string out_dir = "out";
  double amplitude = 0.25;     // random graph amplitude
  int identity_graphs = 3;     // random graphs per grid in the identities suite

  int flow_steps = 6000;
  double flow_dt = 0.0;        // <= 0: automatic stable step
  double flow_amplitude = 0.3;

  double parabolicity_r_max = 40.0;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);

  void validate() const;

  /// Canonical sorted key = value rendering; hashing this stamps the CSVs.
  std::string canonical() const;
  std::string hash() const;
};

/// Builders shared by the CLI, the runner, and the python module.
std::shared_ptr<const BaseManifold> build_base(const RunConfig& config);
WarpFunction build_warp(const RunConfig& config);
StaticPotential build_potential(const RunConfig& config,
                                const BaseManifold& base);
SpacetimePtr build_spacetime(const RunConfig& config);

/// Preset catalog for the CLI.
std::string list_presets_text();

const std::vector<std::string>& known_suites();

} // namespace dwarp
