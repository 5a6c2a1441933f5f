#include "dwarp/cylinder.hpp"
#include "dwarp/identities.hpp"
#include "dwarp/rigidity.hpp"
#include "dwarp/runner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace dwarp;

namespace {

BasePoint make_point(const std::vector<double>& coords, int chart) {
  BasePoint p;
  for (std::size_t k = 0; k < coords.size() && k < 2; ++k) p.coords[k] = coords[k];
  p.chart = chart;
  return p;
}

py::object json_to_py(const nlohmann::ordered_json& j) {
  py::module_ json = py::module_::import("json");
  return json.attr("loads")(j.dump());
}

Eigen::MatrixXd grid_points(const BaseGrid& grid) {
  const int m = grid.model().dim();
  Eigen::MatrixXd out(grid.node_count(), m);
  for (int node = 0; node < grid.node_count(); ++node) {
    const BasePoint p = grid.point(node);
    for (int a = 0; a < m; ++a) out(node, a) = p.coords[a];
  }
  return out;
}

} // namespace

PYBIND11_MODULE(_dwarp, m) {
  m.doc() = "Numerical geometry of doubly warped product spacetimes";

  py::register_exception<SpacelikeViolation>(m, "SpacelikeViolation");
  py::register_exception<StabilityViolation>(m, "StabilityViolation");
  py::register_exception<NonCompactBase>(m, "NonCompactBase");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<BaseManifold, std::shared_ptr<BaseManifold>>(m, "BaseManifold")
      .def_static("circle", [](double r) { return BaseManifold::circle(r); },
                  py::arg("radius") = 1.0)
      .def_static("flat_torus",
                  [](double p0, double p1) { return BaseManifold::flat_torus(p0, p1); },
                  py::arg("period0") = 2.0 * EIGEN_PI, py::arg("period1") = 2.0 * EIGEN_PI)
      .def_static("round_sphere", [](double r) { return BaseManifold::round_sphere(r); },
                  py::arg("radius") = 1.0)
      .def_static("euclidean_plane", [](double w) { return BaseManifold::euclidean_plane(w); },
                  py::arg("half_width") = 6.0)
      .def_property_readonly("dim", &BaseManifold::dim)
      .def_property_readonly("compact", &BaseManifold::compact)
      .def("metric_at",
           [](const BaseManifold& model, const std::vector<double>& coords, int chart) {
             return Matrix(model.metric_at(make_point(coords, chart)));
           },
           py::arg("coords"), py::arg("chart") = 0)
      .def("__repr__", &BaseManifold::describe);

  py::class_<BaseGrid, std::shared_ptr<BaseGrid>>(m, "BaseGrid")
      .def(py::init([](std::shared_ptr<BaseManifold> model, int n0, int n1) {
             std::shared_ptr<const BaseManifold> cmodel = model;
             return std::const_pointer_cast<BaseGrid>(
                 n1 > 0 ? BaseGrid::make(cmodel, n0, n1) : BaseGrid::make(cmodel, n0));
           }),
           py::arg("model"), py::arg("n0"), py::arg("n1") = 0)
      .def_property_readonly("node_count", &BaseGrid::node_count)
      .def_property_readonly("spacing_max", &BaseGrid::spacing_max)
      .def("points", &grid_points)
      .def("weights", [](const BaseGrid& grid) {
        Array w(grid.node_count());
        for (int node = 0; node < grid.node_count(); ++node) w[node] = grid.weight(node);
        return w;
      });

  py::class_<WarpFunction>(m, "WarpFunction")
      .def_static("constant",
                  [](double c, double lo, double hi) {
                    return WarpFunction::constant(c, {lo, hi});
                  })
      .def_static("exponential",
                  [](double rate, double lo, double hi) {
                    return WarpFunction::exponential(rate, {lo, hi});
                  })
      .def_static("hyperbolic_cosine",
                  [](double rate, double lo, double hi) {
                    return WarpFunction::hyperbolic_cosine(rate, {lo, hi});
                  })
      .def_static("polynomial",
                  [](std::vector<double> coeffs, double lo, double hi) {
                    return WarpFunction::polynomial(std::move(coeffs), {lo, hi});
                  })
      .def_static("tabulated", &WarpFunction::tabulated)
      .def("value", &WarpFunction::value)
      .def("deriv", &WarpFunction::deriv)
      .def("antideriv", &WarpFunction::antideriv)
      .def("nondecreasing", [](const WarpFunction& w) { return w.nondecreasing_on_domain(); })
      .def("__repr__", &WarpFunction::describe);

  py::class_<StaticPotential>(m, "StaticPotential")
      .def_static("constant", &StaticPotential::constant)
      .def_static("cosine_offset",
                  [](const BaseManifold& model, double offset, double amplitude, int axis) {
                    return StaticPotential::cosine_offset(model, offset, amplitude, axis);
                  },
                  py::arg("model"), py::arg("offset"), py::arg("amplitude"), py::arg("axis") = 0)
      .def_static("radial_exponential", &StaticPotential::radial_exponential)
      .def_static("radial_power", &StaticPotential::radial_power)
      .def("value",
           [](const StaticPotential& h, const std::vector<double>& coords, int chart) {
             return h.value(make_point(coords, chart));
           },
           py::arg("coords"), py::arg("chart") = 0)
      .def("__repr__", &StaticPotential::describe);

  py::class_<DoublyWarpedSpacetime, std::shared_ptr<DoublyWarpedSpacetime>>(m, "Spacetime")
      .def(py::init([](std::shared_ptr<BaseManifold> base, WarpFunction warp, StaticPotential h,
                       bool monotone) {
             return std::make_shared<DoublyWarpedSpacetime>(base, std::move(warp), std::move(h),
                                                            monotone);
           }),
           py::arg("base"), py::arg("warp"), py::arg("potential"), py::arg("monotone") = false)
      .def("ambient_metric",
           [](const DoublyWarpedSpacetime& st, double t, const std::vector<double>& coords,
              int chart) {
             return Matrix(st.ambient_metric_at({t, make_point(coords, chart)}));
           },
           py::arg("t"), py::arg("coords"), py::arg("chart") = 0)
      .def("conformal_scalars",
           [](const DoublyWarpedSpacetime& st, double t, const std::vector<double>& coords) {
             const auto [field, data] = st.conformal_field_at({t, make_point(coords, 0)});
             return py::make_tuple(data.alpha, data.eta, data.script_H);
           })
      .def("lie_derivative_residual",
           [](const DoublyWarpedSpacetime& st, double t, const std::vector<double>& coords) {
             return st.lie_derivative_residual({t, make_point(coords, 0)});
           })
      .def("slice_geometry",
           [](const DoublyWarpedSpacetime& st, double t0, const GridPtr& grid) {
             SliceGeometry out = st.slice_geometry(t0, grid);
             return py::make_tuple(out.umbilicity_defect, Array(out.mean_curvature.values));
           })
      .def("script_H",
           [](const DoublyWarpedSpacetime& st, double t, const std::vector<double>& coords) {
             return st.script_H(t, make_point(coords, 0));
           })
      .def("__repr__", &DoublyWarpedSpacetime::describe);

  py::class_<GraphHypersurface>(m, "GraphHypersurface")
      .def(py::init([](SpacetimePtr st, const GridPtr& grid, const Array& heights) {
             return GraphHypersurface(std::move(st), ScalarField(grid, heights));
           }),
           py::arg("spacetime"), py::arg("grid"), py::arg("heights"))
      .def_property_readonly("height",
                             [](const GraphHypersurface& s) { return Array(s.height().values); })
      .def_property_readonly("margin",
                             [](const GraphHypersurface& s) { return Array(s.margin().values); })
      .def_property_readonly("cosh_theta",
                             [](const GraphHypersurface& s) {
                               return Array(s.cosh_theta_field().values);
                             })
      .def("mean_curvature",
           [](const GraphHypersurface& s) { return Array(s.mean_curvature_field().values); })
      .def("mean_curvature_via_divergence",
           [](const GraphHypersurface& s) {
             return Array(s.mean_curvature_via_divergence().values);
           })
      .def("script_H",
           [](const GraphHypersurface& s) { return Array(s.script_H_field().values); })
      .def("weighted_laplacian_forms",
           [](const GraphHypersurface& s) {
             auto [a, b] = s.weighted_laplacian_forms();
             return py::make_tuple(Array(a.values), Array(b.values));
           })
      .def("projection_metric_comparison", &GraphHypersurface::projection_metric_comparison)
      .def("to_csv",
           [](const GraphHypersurface& s, const std::string& comment) {
             std::ostringstream out;
             s.write_csv(out, comment);
             return out.str();
           },
           py::arg("comment") = std::string{});

  m.def("slice_graph", [](SpacetimePtr st, const GridPtr& grid, double t0) {
    return GraphHypersurface(std::move(st), slice_height(grid, t0));
  });
  m.def("random_graph",
        [](const SpacetimePtr& st, const GridPtr& grid, std::uint64_t seed, double amplitude) {
          return random_spacelike_graph(st, grid, seed, amplitude);
        },
        py::arg("spacetime"), py::arg("grid"), py::arg("seed"), py::arg("amplitude") = 0.25);
  m.def("bump_graph",
        [](SpacetimePtr st, const GridPtr& grid, double t0, double height, double radius) {
          return GraphHypersurface(std::move(st), bump_graph_height(grid, t0, height, radius));
        });

  m.def("check_identities",
        [](const GraphHypersurface& s, std::uint64_t seed) {
          IdentityCheckOptions options;
          options.seed = seed;
          py::list out;
          for (const auto& report : check_all_identities(s, options)) {
            out.append(json_to_py(report.to_json()));
          }
          return out;
        },
        py::arg("surface"), py::arg("seed") = 1);

  m.def("find_totally_geodesic_slice", [](const WarpFunction& warp) {
    const SliceSearchResult res = find_totally_geodesic_slice(warp);
    const char* kind = res.kind == SliceSearchResult::Kind::Found ? "found"
                       : res.kind == SliceSearchResult::Kind::IdenticallyGeodesic
                           ? "identically_geodesic"
                           : "none";
    return py::make_tuple(kind, res.t0 ? py::cast(*res.t0) : py::none());
  });
  m.def("probe_compact_rigidity",
        [](const SpacetimePtr& st, const GridPtr& grid, int trials, std::uint64_t seed) {
          return json_to_py(probe_compact_rigidity(st, grid, trials, seed).to_json());
        });
  m.def("extrema_battery",
        [](const SpacetimePtr& st, const GridPtr& grid, int trials, std::uint64_t seed) {
          return json_to_py(extrema_inequality_battery(st, grid, trials, seed).to_json());
        });
  m.def("static_cmc_battery",
        [](const SpacetimePtr& st, const GridPtr& grid, int trials, std::uint64_t seed) {
          return json_to_py(static_cmc_battery(st, grid, trials, seed).to_json());
        });
  m.def("slice_seeking_flow",
        [](const GraphHypersurface& start, int steps, double dt) {
          FlowOptions options;
          options.steps = steps;
          options.dt = dt;
          return json_to_py(slice_seeking_flow(start, options).to_json());
        },
        py::arg("start"), py::arg("steps") = 4000, py::arg("dt") = 0.0);
  m.def("asymptotic_probe", [](const SpacetimePtr& st, double t0, int trials) {
    AsymptoticProbeOptions options;
    options.trials = trials;
    return json_to_py(asymptotic_probe(st, t0, options).to_json());
  });
  m.def("parabolicity_classifier",
        [](const SpacetimePtr& st, const std::string& weight, double r_max) {
          const auto kind = weight == "rho_h_squared"
                                ? ParabolicityVerdict::WeightKind::RhoHSquared
                                : ParabolicityVerdict::WeightKind::HSquared;
          ParabolicityOptions options;
          options.r_max = r_max;
          return json_to_py(parabolicity_classifier(st, kind, options).to_json());
        },
        py::arg("spacetime"), py::arg("weight") = "h_squared", py::arg("r_max") = 40.0);

  auto cyl = m.def_submodule("cylinder", "flat Lorentzian cylinder checks");
  cyl.def("killing_residual", [](double a) { return cylinder::killing_residual(a); });
  cyl.def("circle_orthogonality_defect", &cylinder::circle_orthogonality_defect, py::arg("a"),
          py::arg("t0"), py::arg("samples") = 128);
  cyl.def("helix_checks", [](double a, double t0) {
    const auto res = cylinder::helix_checks(a, t0);
    return py::make_tuple(res.geodesic_residual, res.orthogonality_residual,
                          res.causal_character);
  });
  cyl.def("report",
          [](const std::vector<double>& a_values) { return json_to_py(cylinder::report(a_values)); });

  m.def("list_presets", &list_presets_text);
  m.def("run_config", [](const std::string& text) {
    const RunConfig config = RunConfig::from_string(text);
    const RunReport report = run(config);
    return py::make_tuple(report.overall_pass, json_to_py(report.report));
  });
  m.def("run_config_file", [](const std::string& path) {
    const RunConfig config = RunConfig::from_file(path);
    const RunReport report = run(config);
    return py::make_tuple(report.overall_pass, json_to_py(report.report));
  });
}
