#pragma once

#include "dwarp/hypersurface.hpp"

#include <nlohmann/json_fwd.hpp>
#include <optional>

namespace dwarp {

/// One trial of a theorem probe.
struct TrialRecord {
  std::uint64_t seed = 0;
  double min_defect = 0.0; // min over nodes of H - script_H (or check-specific)
  int argmin_node = -1;
  bool violation = false;  // the forbidden sign / object was found (expected)
  bool refined = false;    // re-run at half spacing near the threshold
  bool degenerate = false; // flat discrete Hessian at an extremum
};

/// Batch result of a probe. The probes test nonexistence statements through
/// their contrapositives, so passed means the forbidden configuration was
/// found in every trial (or never found, for the constancy probes).
struct ProbeReport {
  std::string theorem;
  int trials = 0;
  int violations_found = 0;
  double worst_margin = 0.0;
  std::vector<TrialRecord> details;
  bool passed = false;

  nlohmann::ordered_json to_json() const;
};

/// Trace of the slice-seeking flow.
struct FlowTrace {
  std::vector<double> times;
  std::vector<double> oscillation;  // max u - min u
  std::vector<double> sup_H_defect; // max |H - script_H|

  nlohmann::ordered_json to_json() const;
};

struct ParabolicityVerdict {
  enum class Verdict { Diverges, Converges, Inconclusive };
  enum class WeightKind { RhoHSquared, HSquared };

  std::vector<std::pair<double, double>> integral_estimates; // (R, partial)
  Verdict verdict = Verdict::Inconclusive;
  WeightKind weight_kind = WeightKind::HSquared;
  double growth_exponent = 0.0;

  nlohmann::ordered_json to_json() const;
};

std::string to_string(ParabolicityVerdict::Verdict v);

/// Search result for a totally geodesic slice (a zero of the warp slope).
struct SliceSearchResult {
  enum class Kind { None, Found, IdenticallyGeodesic } kind = Kind::None;
  std::optional<double> t0;
};

/// Scans the interval for zeros of rho' and refines by bisection to
/// |rho'| <= 1e-10; constant warps report every slice as geodesic.
SliceSearchResult find_totally_geodesic_slice(const WarpFunction& warp);

/// Max |H - script_H| over a slice by the graph geometry route (control case
/// for the rigidity probe; roundoff-level for closed-form presets).
double slice_control_defect(const SpacetimePtr& spacetime, const GridPtr& grid, double t0);

struct RigidityProbeOptions {
  double amplitude = 0.2;       // initial graph amplitude (fraction of span applied later)
  double margin_floor = 1e-6;
  double tol_constant = 5.0;    // tol_probe = tol_constant * spacing^2 * third-derivative scale
};

/// Nondecreasing warp forbids compact non-slice graphs with H >= script_H
/// everywhere, so every random non-constant graph must dip below:
/// min(H - script_H) < -tol_probe. Trials near the threshold re-run at half
/// spacing. Requires the monotone flag.
ProbeReport probe_compact_rigidity(const SpacetimePtr& spacetime, const GridPtr& grid, int trials,
                                   std::uint64_t seed, const RigidityProbeOptions& options = {});

/// At a global min of the height, script_H <= H + tol; at a global max,
/// script_H >= H - tol, with tol = tol_constant * spacing. Flat discrete
/// Hessians at the extremum are flagged, not failed.
ProbeReport extrema_inequality_check(const GraphHypersurface& surface, double tol_constant = 5.0);

ProbeReport extrema_inequality_battery(const SpacetimePtr& spacetime, const GridPtr& grid,
                                       int trials, std::uint64_t seed,
                                       const RigidityProbeOptions& options = {});

/// Constant warp: a non-constant compact graph cannot have constant mean
/// curvature. Counts constant-H non-slice graphs as violations (none may
/// occur). Requires rho constant.
ProbeReport static_cmc_check(const GraphHypersurface& surface, double tol_constant = 5.0);

ProbeReport static_cmc_battery(const SpacetimePtr& spacetime, const GridPtr& grid, int trials,
                               std::uint64_t seed, const RigidityProbeOptions& options = {});

struct FlowOptions {
  int steps = 4000;
  double dt = 0.0;        // <= 0: largest stable step from the coefficients
  int record_every = 20;
  double cfl = 0.4;
};

/// Explicit drift-diffusion flow of the height by the first weighted form;
/// slices are fixed points and the oscillation decays monotonically.
/// Raises StabilityViolation when dt exceeds the stability bound or the
/// oscillation grows; SpacelikeViolation if the margin collapses.
FlowTrace slice_seeking_flow(const GraphHypersurface& start, const FlowOptions& options = {});

struct AsymptoticProbeOptions {
  double height = 0.3;
  double radius = 2.5;
  int trials = 8;
  std::uint64_t seed = 11;
};

/// Plane base: compactly supported bumps above a slice must dip below
/// script_H somewhere, and the radial flux field rho h^2 |grad tau|^2 stays
/// nonnegative. Raises if the bump support touches the truncation boundary.
ProbeReport asymptotic_probe(const SpacetimePtr& spacetime, double t0,
                             const AsymptoticProbeOptions& options = {});

struct ParabolicityOptions {
  double r_max = 40.0;
  int radial_panels = 4096;
  int angular_samples = 256;
  double height_profile_t = 0.0; // slice height used for the rho weight
};

/// Heuristic classification of the reciprocal boundary-integral test
///   integral over r of (circle integral of w)^{-1},
/// w = rho h^2 or h^2, sampled at R_max/4, R_max/2, R_max; the verdict fits
/// the growth exponent of the increments and is reported as a heuristic,
/// never as a proof.
ParabolicityVerdict parabolicity_classifier(const SpacetimePtr& spacetime,
                                            ParabolicityVerdict::WeightKind kind,
                                            const ParabolicityOptions& options = {});

} // namespace dwarp
