#include "dwarp/rigidity.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

namespace dwarp {

namespace {

double min_defect_over_trusted(const BaseGrid& grid, const Array& defect, int& argmin) {
  double best = std::numeric_limits<double>::infinity();
  argmin = -1;
  for (int node = 0; node < grid.node_count(); ++node) {
    if (!grid.trusted(node)) continue;
    if (defect[node] < best) {
      best = defect[node];
      argmin = node;
    }
  }
  return best;
}

GridPtr refined_grid(const BaseGrid& grid) {
  const GridBlock& blk = grid.block(0);
  if (grid.model().dim() == 1) {
    return BaseGrid::make(grid.model_ptr(), 2 * blk.dims[0]);
  }
  return BaseGrid::make(grid.model_ptr(), 2 * blk.dims[0], 2 * blk.dims[1]);
}

Array curvature_defect(const GraphHypersurface& surface) {
  return surface.mean_curvature_field().values - surface.script_H_field().values;
}

} // namespace

nlohmann::ordered_json ProbeReport::to_json() const {
  nlohmann::ordered_json j;
  j["theorem"] = theorem;
  j["trials"] = trials;
  j["violations_found"] = violations_found;
  j["worst_margin"] = worst_margin;
  j["passed"] = passed;
  nlohmann::ordered_json det = nlohmann::ordered_json::array();
  for (const auto& t : details) {
    nlohmann::ordered_json row;
    row["seed"] = t.seed;
    row["min_defect"] = t.min_defect;
    row["argmin_node"] = t.argmin_node;
    row["violation"] = t.violation;
    row["refined"] = t.refined;
    row["degenerate"] = t.degenerate;
    det.push_back(row);
  }
  j["details"] = det;
  return j;
}

nlohmann::ordered_json FlowTrace::to_json() const {
  nlohmann::ordered_json j;
  j["times"] = times;
  j["oscillation"] = oscillation;
  j["sup_H_defect"] = sup_H_defect;
  return j;
}

std::string to_string(ParabolicityVerdict::Verdict v) {
  switch (v) {
    case ParabolicityVerdict::Verdict::Diverges: return "diverges";
    case ParabolicityVerdict::Verdict::Converges: return "converges";
    case ParabolicityVerdict::Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

nlohmann::ordered_json ParabolicityVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["weight_kind"] = weight_kind == WeightKind::RhoHSquared ? "rho_h_squared" : "h_squared";
  j["verdict"] = to_string(verdict);
  j["growth_exponent"] = growth_exponent;
  j["heuristic"] = true;
  nlohmann::ordered_json est = nlohmann::ordered_json::array();
  for (const auto& [r, partial] : integral_estimates) est.push_back({r, partial});
  j["integral_estimates"] = est;
  return j;
}

SliceSearchResult find_totally_geodesic_slice(const WarpFunction& warp) {
  const Interval& I = warp.domain();
  const int samples = 4096;
  const double inset = 1e-9 * I.span();
  const double lo = I.lo + inset, hi = I.hi - inset;

  double scale = 0.0;
  for (int k = 0; k <= samples; ++k) {
    scale = std::max(scale, std::abs(warp.deriv(lo + (hi - lo) * k / samples)));
  }
  if (scale <= 1e-12) {
    SliceSearchResult res;
    res.kind = SliceSearchResult::Kind::IdenticallyGeodesic;
    res.t0 = I.mid();
    return res;
  }

  auto refine = [&](double a, double b) {
    for (int it = 0; it < 200 && b - a > 1e-15 * I.span(); ++it) {
      const double mid = 0.5 * (a + b);
      if ((warp.deriv(a) <= 0.0) == (warp.deriv(mid) <= 0.0)) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  double best_t = lo;
  double best_val = std::abs(warp.deriv(lo));
  for (int k = 0; k < samples; ++k) {
    const double a = lo + (hi - lo) * k / samples;
    const double b = lo + (hi - lo) * (k + 1) / samples;
    if (std::abs(warp.deriv(a)) < best_val) {
      best_val = std::abs(warp.deriv(a));
      best_t = a;
    }
    if ((warp.deriv(a) <= 0.0) != (warp.deriv(b) <= 0.0)) {
      const double t0 = refine(a, b);
      if (std::abs(warp.deriv(t0)) <= 1e-10) {
        SliceSearchResult res;
        res.kind = SliceSearchResult::Kind::Found;
        res.t0 = t0;
        return res;
      }
    }
  }
  if (best_val <= 1e-10) {
    SliceSearchResult res;
    res.kind = SliceSearchResult::Kind::Found;
    res.t0 = best_t;
    return res;
  }
  return {};
}

double slice_control_defect(const SpacetimePtr& spacetime, const GridPtr& grid, double t0) {
  GraphHypersurface slice(spacetime, slice_height(grid, t0));
  return curvature_defect(slice).abs().maxCoeff();
}

ProbeReport probe_compact_rigidity(const SpacetimePtr& spacetime, const GridPtr& grid, int trials,
                                   std::uint64_t seed, const RigidityProbeOptions& options) {
  if (!spacetime->base().compact()) {
    throw NonCompactBase("the compact rigidity probe requires a compact base");
  }
  if (!spacetime->monotone()) {
    throw ConfigError(
        "the compact rigidity probe requires the monotone (nondecreasing warp) flag");
  }

  ProbeReport report;
  report.theorem = "compact_rigidity";
  report.trials = trials;
  report.details.resize(trials);

  parallel_for(trials, [&](int trial) {
    TrialRecord rec;
    rec.seed = split_seed(seed, trial);
    GraphHypersurface surface =
        random_spacelike_graph(spacetime, grid, rec.seed, options.amplitude, options.margin_floor);
    const double spacing = grid->spacing_max();
    const double tol = options.tol_constant * spacing * spacing * height_derivative_scale(surface, 3);
    Array defect = curvature_defect(surface);
    rec.min_defect = min_defect_over_trusted(*grid, defect, rec.argmin_node);
    rec.violation = rec.min_defect < -tol;

    if (!rec.violation && rec.min_defect < 0.0) {
      // Near the threshold: retry the same analytic graph at half spacing to
      // separate discretization noise from a genuine sign.
      rec.refined = true;
      const GridPtr fine = refined_grid(*grid);
      const int n0 = grid->block(0).dims[0];
      const int n1 = grid->model().dim() == 2 ? grid->block(0).dims[1] : n0;
      GraphSampler sampler(grid->model(), rec.seed,
                           std::max(1, std::min(10, std::min(n0, n1) / 4)));
      const double amp =
          fit_amplitude(spacetime, grid, sampler, options.amplitude, options.margin_floor);
      GraphHypersurface refined(
          spacetime, sample_graph_height(fine, sampler, spacetime->interval().mid(), amp));
      Array fine_defect = curvature_defect(refined);
      int fine_argmin;
      const double fine_min = min_defect_over_trusted(*fine, fine_defect, fine_argmin);
      const double fine_tol =
          options.tol_constant * 0.25 * spacing * spacing * height_derivative_scale(refined, 3);
      rec.min_defect = fine_min;
      rec.argmin_node = fine_argmin;
      rec.violation = fine_min < -fine_tol;
    }
    report.details[trial] = rec;
  });

  report.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& rec : report.details) {
    report.violations_found += rec.violation ? 1 : 0;
    report.worst_margin = std::max(report.worst_margin, rec.min_defect);
  }
  report.passed = report.violations_found == report.trials;
  return report;
}

ProbeReport extrema_inequality_check(const GraphHypersurface& surface, double tol_constant) {
  const BaseGrid& grid = surface.grid();
  if (!grid.model().compact()) {
    throw NonCompactBase("the extrema probe requires a compact base");
  }
  const Array& u = surface.height().values;
  int node_min = 0, node_max = 0;
  for (int node = 1; node < grid.node_count(); ++node) {
    if (u[node] < u[node_min]) node_min = node;
    if (u[node] > u[node_max]) node_max = node;
  }

  const double tol = tol_constant * grid.spacing_max();
  const ScalarField h_mean = surface.mean_curvature_field();
  const ScalarField script_h = surface.script_H_field();

  // Discrete Hessian magnitude; flat extrema make the inequality weak.
  auto hessian_scale = [&](int node) {
    double worst = 0.0;
    for (int axis = 0; axis < grid.model().dim(); ++axis) {
      const int p = grid.neighbor(node, axis, 1);
      const int q = grid.neighbor(node, axis, -1);
      if (p < 0 || q < 0) continue;
      const double dd = u[p] - 2.0 * u[node] + u[q];
      worst = std::max(worst, std::abs(dd) / (grid.spacing(axis) * grid.spacing(axis)));
    }
    return worst;
  };

  TrialRecord rec;
  rec.degenerate = hessian_scale(node_min) < 1e-8 || hessian_scale(node_max) < 1e-8;
  const double slack_min = h_mean.values[node_min] + tol - script_h.values[node_min];
  const double slack_max = script_h.values[node_max] + tol - h_mean.values[node_max];
  rec.min_defect = std::min(slack_min, slack_max);
  rec.argmin_node = slack_min <= slack_max ? node_min : node_max;
  rec.violation = rec.min_defect < 0.0;

  ProbeReport report;
  report.theorem = "extrema_bounds";
  report.trials = 1;
  report.violations_found = rec.violation ? 1 : 0;
  report.worst_margin = rec.min_defect;
  report.details.push_back(rec);
  report.passed = !rec.violation;
  return report;
}

ProbeReport extrema_inequality_battery(const SpacetimePtr& spacetime, const GridPtr& grid,
                                       int trials, std::uint64_t seed,
                                       const RigidityProbeOptions& options) {
  ProbeReport report;
  report.theorem = "extrema_bounds";
  report.trials = trials;
  report.details.resize(trials);
  parallel_for(trials, [&](int trial) {
    const std::uint64_t trial_seed = split_seed(seed, trial);
    GraphHypersurface surface =
        random_spacelike_graph(spacetime, grid, trial_seed, options.amplitude,
                               options.margin_floor);
    ProbeReport one = extrema_inequality_check(surface, options.tol_constant);
    one.details[0].seed = trial_seed;
    report.details[trial] = one.details[0];
  });
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& rec : report.details) {
    report.violations_found += rec.violation ? 1 : 0;
    report.worst_margin = std::min(report.worst_margin, rec.min_defect);
  }
  report.passed = report.violations_found == 0;
  return report;
}

ProbeReport static_cmc_check(const GraphHypersurface& surface, double tol_constant) {
  const DoublyWarpedSpacetime& st = surface.spacetime();
  if (!st.warp().is_constant()) {
    throw ConfigError("the constant-mean-curvature probe requires a constant warp");
  }
  const BaseGrid& grid = surface.grid();
  if (!grid.model().compact()) {
    throw NonCompactBase("the constant-mean-curvature probe requires a compact base");
  }
  const Array& u = surface.height().values;
  const double u_spread = u.maxCoeff() - u.minCoeff();
  const double spacing = grid.spacing_max();
  const double tol = tol_constant * spacing * spacing;

  TrialRecord rec;
  if (u_spread <= 1e-12 * st.interval().span()) {
    // A slice: constant H (= 0) is the expected outcome, not a violation.
    rec.min_defect = surface.mean_curvature_field().values.abs().maxCoeff();
    rec.violation = false;
  } else {
    const Array h_mean = surface.mean_curvature_field().values;
    const double spread = h_mean.maxCoeff() - h_mean.minCoeff();
    rec.min_defect = spread;
    // A non-constant graph with numerically constant H would contradict the
    // constancy rigidity; finding one is the forbidden event.
    rec.violation = spread <= tol;
  }

  ProbeReport report;
  report.theorem = "static_cmc";
  report.trials = 1;
  report.violations_found = rec.violation ? 1 : 0;
  report.worst_margin = rec.min_defect;
  report.details.push_back(rec);
  report.passed = !rec.violation;
  return report;
}

ProbeReport static_cmc_battery(const SpacetimePtr& spacetime, const GridPtr& grid, int trials,
                               std::uint64_t seed, const RigidityProbeOptions& options) {
  ProbeReport report;
  report.theorem = "static_cmc";
  report.trials = trials;
  report.details.resize(trials);
  parallel_for(trials, [&](int trial) {
    const std::uint64_t trial_seed = split_seed(seed, trial);
    GraphHypersurface surface =
        random_spacelike_graph(spacetime, grid, trial_seed, options.amplitude,
                               options.margin_floor);
    ProbeReport one = static_cmc_check(surface, options.tol_constant);
    one.details[0].seed = trial_seed;
    report.details[trial] = one.details[0];
  });
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& rec : report.details) {
    report.violations_found += rec.violation ? 1 : 0;
    report.worst_margin = std::min(report.worst_margin, rec.min_defect);
  }
  report.passed = report.violations_found == 0;
  return report;
}

FlowTrace slice_seeking_flow(const GraphHypersurface& start, const FlowOptions& options) {
  const BaseGrid& grid = start.grid();
  if (!grid.model().compact()) {
    throw NonCompactBase("the slice-seeking flow requires a compact base");
  }
  if (!start.spacetime().monotone()) {
    throw ConfigError("the slice-seeking flow requires the monotone (nondecreasing warp) flag");
  }
  const int m = grid.model().dim();

  FlowTrace trace;
  ScalarField u = start.height();
  auto surface =
      std::make_unique<GraphHypersurface>(start.spacetime_ptr(), u, start.stencil_order());
  double time = 0.0;
  double prev_osc = std::numeric_limits<double>::infinity();
  const double span = start.spacetime().interval().span();

  auto record = [&](const GraphHypersurface& s) {
    trace.times.push_back(time);
    trace.oscillation.push_back(s.height().values.maxCoeff() - s.height().values.minCoeff());
    trace.sup_H_defect.push_back(curvature_defect(s).abs().maxCoeff());
  };
  record(*surface);

  for (int step = 0; step < options.steps; ++step) {
    // Explicit stability bound from the current diffusion coefficients.
    double worst_rate = 0.0;
    const SymTensorField& g = surface->induced_metric();
    for (int node = 0; node < grid.node_count(); ++node) {
      double rate;
      if (m == 1) {
        rate = (1.0 / g.c00[node]) * 2.0 / (grid.spacing(0) * grid.spacing(0));
      } else {
        const double det = g.det(node, 2);
        rate = (g.c11[node] / det) * 2.0 / (grid.spacing(0) * grid.spacing(0)) +
               (g.c00[node] / det) * 2.0 / (grid.spacing(1) * grid.spacing(1));
      }
      worst_rate = std::max(worst_rate, rate);
    }
    const double dt_stable = options.cfl / worst_rate;
    const double dt = options.dt > 0.0 ? options.dt : dt_stable;
    if (dt > dt_stable * (1.0 + 1e-12)) {
      throw StabilityViolation("flow step exceeds the explicit stability bound (" +
                               std::to_string(dt) + " > " + std::to_string(dt_stable) + ")");
    }

    const ScalarField rate_field = surface->weighted_laplacian_forms().first;
    u.values += dt * rate_field.values;
    time += dt;
    surface =
        std::make_unique<GraphHypersurface>(start.spacetime_ptr(), u, start.stencil_order());

    const double osc = u.values.maxCoeff() - u.values.minCoeff();
    if (osc > prev_osc * (1.0 + 1e-12) + 1e-14 * span) {
      throw StabilityViolation("flow oscillation increased between steps");
    }
    prev_osc = osc;

    if ((step + 1) % options.record_every == 0 || step + 1 == options.steps) {
      record(*surface);
    }
    if (osc < 1e-13 * span) {
      if (trace.times.back() != time) record(*surface);
      break;
    }
  }
  return trace;
}

ProbeReport asymptotic_probe(const SpacetimePtr& spacetime, double t0,
                             const AsymptoticProbeOptions& options) {
  if (spacetime->base().kind() != BaseKind::EuclideanPlane) {
    throw ConfigError("the asymptotic probe requires the plane base");
  }
  if (!spacetime->monotone()) {
    throw ConfigError("the asymptotic probe requires the monotone (nondecreasing warp) flag");
  }
  const GridPtr grid = BaseGrid::make(spacetime->base_ptr(), 96);
  const double spacing = grid->spacing_max();
  const double trust_extent = spacetime->base().half_width() - 6.0 * spacing;
  if (options.radius >= trust_extent) {
    throw std::invalid_argument("bump support touches the truncation boundary");
  }

  ProbeReport report;
  report.theorem = "asymptotic_slice";
  report.trials = options.trials;
  report.details.resize(options.trials);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> height_pick(0.3, 1.0);
  std::uniform_real_distribution<double> radius_pick(0.5, 1.0);

  double worst_flux = 0.0;
  for (int trial = 0; trial < options.trials; ++trial) {
    TrialRecord rec;
    rec.seed = split_seed(options.seed, trial);
    const double height = options.height * height_pick(rng);
    const double radius = options.radius * radius_pick(rng);
    GraphHypersurface surface(spacetime, bump_graph_height(grid, t0, height, radius));

    Array defect = curvature_defect(surface);
    rec.min_defect = min_defect_over_trusted(*grid, defect, rec.argmin_node);
    const double tol = 5.0 * spacing * spacing * height_derivative_scale(surface, 3);
    rec.violation = rec.min_defect < -tol;

    // Hypothesis field of the divergence comparison: rho h^2 |grad tau|^2
    // must be pointwise nonnegative.
    const VectorField grad_u = grad_metric(surface.height(), surface.induced_metric());
    for (int node = 0; node < grid->node_count(); ++node) {
      double q = 0.0;
      for (int a = 0; a < 2; ++a) {
        q += grad_u.comp[a][node] * surface.height_gradient().comp[a][node];
      }
      const double h = spacetime->potential().value(grid->point(node));
      const double rho = spacetime->warp().value(surface.height().values[node]);
      worst_flux = std::min(worst_flux, rho * h * h * q);
    }
    report.details[trial] = rec;
  }

  report.worst_margin = worst_flux;
  for (const auto& rec : report.details) report.violations_found += rec.violation ? 1 : 0;
  report.passed = report.violations_found == report.trials && worst_flux >= -1e-12;
  return report;
}

ParabolicityVerdict parabolicity_classifier(const SpacetimePtr& spacetime,
                                            ParabolicityVerdict::WeightKind kind,
                                            const ParabolicityOptions& options) {
  if (spacetime->base().kind() != BaseKind::EuclideanPlane) {
    throw ConfigError("the parabolicity classifier requires the plane base");
  }
  if (options.r_max < 10.0) {
    throw std::invalid_argument("the classifier needs r_max >= 10");
  }
  const double rho_factor = kind == ParabolicityVerdict::WeightKind::RhoHSquared
                                ? spacetime->warp().value(options.height_profile_t)
                                : 1.0;
  auto weight = [&](const BasePoint& p) {
    const double h = spacetime->potential().value(p);
    return rho_factor * h * h;
  };
  auto boundary = [&](double r) {
    return boundary_sphere_integral(spacetime->base(), weight, r, BasePoint{},
                                    options.angular_samples);
  };

  // Composite Simpson on [a, b]; the integrand 1/B is smooth and positive.
  auto simpson = [&](double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = 1.0 / boundary(a) + 1.0 / boundary(b);
    for (int k = 1; k < panels; ++k) {
      acc += (k % 2 == 1 ? 4.0 : 2.0) / boundary(a + k * h);
    }
    return acc * h / 3.0;
  };

  const int panels = std::max(16, options.radial_panels / 4) & ~1;
  const double r1 = options.r_max / 4.0;
  const double r2 = options.r_max / 2.0;
  const double r3 = options.r_max;

  ParabolicityVerdict out;
  out.weight_kind = kind;
  const double p1 = simpson(1.0, r1, panels);
  const double d1 = simpson(r1, r2, panels);
  const double d2 = simpson(r2, r3, panels);
  out.integral_estimates = {{r1, p1}, {r2, p1 + d1}, {r3, p1 + d1 + d2}};

  // Increments over geometric ranges scale like 2^{-q} when the boundary
  // integral grows like r^{1+q}; q <= 0 is the divergent regime.
  if (d2 <= 0.0 || d1 <= 0.0) {
    out.verdict = ParabolicityVerdict::Verdict::Converges;
    out.growth_exponent = std::numeric_limits<double>::infinity();
    return out;
  }
  out.growth_exponent = -std::log2(d2 / d1);
  if (out.growth_exponent <= 0.2) {
    out.verdict = ParabolicityVerdict::Verdict::Diverges;
  } else if (out.growth_exponent >= 0.7) {
    out.verdict = ParabolicityVerdict::Verdict::Converges;
  } else {
    out.verdict = ParabolicityVerdict::Verdict::Inconclusive;
  }
  return out;
}

} // namespace dwarp
