#pragma once

#include "dwarp/operators.hpp"
#include "dwarp/spacetime.hpp"

#include <iosfwd>

namespace dwarp {

/// First- and second-order geometry of a graph at one grid node.
///
/// Sign convention: shape = covariant gradient of the future unit normal as
/// an endomorphism of the tangent space, so mean_curvature = trace(shape)/m
/// and time slices give shape = script_H * Id.
struct PointGeometry {
  Matrix induced_metric;       // m x m
  Matrix induced_metric_inv;   // m x m
  Vector normal;               // m+1 ambient components, future-pointing
  Matrix shape;                // m x m
  double mean_curvature = 0.0;
  double cosh_theta = 1.0;
  Vector x_tangent;            // chart components of the tangential part of
                               // the conformal field
};

/// Spacelike graph psi(x) = (u(x), x) over a base grid.
///
/// Two independent mean-curvature routes are provided:
///  - geometry_at / mean_curvature_field: pointwise normal differentiation
///    against the closed-form ambient connection (never touches the metric
///    divergence machinery);
///  - mean_curvature_via_divergence: the conservative flux form
///    div_g(rho h^2 grad_g u) = m h rho (H cosh(theta) - script_H) solved
///    for H (never touches the ambient connection).
/// The two share only the nodal height derivative data that defines the
/// discrete surface itself.
class GraphHypersurface {
public:
  GraphHypersurface(SpacetimePtr spacetime, ScalarField height,
                    StencilOrder order = StencilOrder::Second);

  const DoublyWarpedSpacetime& spacetime() const { return *spacetime_; }
  SpacetimePtr spacetime_ptr() const { return spacetime_; }
  const BaseGrid& grid() const { return height_.grid(); }
  GridPtr grid_ptr() const { return height_.grid_ptr(); }
  StencilOrder stencil_order() const { return order_; }

  const ScalarField& height() const { return height_; }
  const VectorField& height_gradient() const { return dheight_; }
  /// Smallest eigenvalue of the induced metric per node (> 0 everywhere).
  const ScalarField& margin() const { return margin_; }
  const SymTensorField& induced_metric() const { return metric_; }
  const ScalarField& cosh_theta_field() const { return cosh_theta_; }
  /// script_H along the graph: rho'(u) / (rho(u) h).
  ScalarField script_H_field() const;

  PointGeometry geometry_at(int node) const;
  /// Mean curvature by the pointwise normal-derivative route.
  ScalarField mean_curvature_field() const;
  /// Mean curvature by the conservative divergence route.
  ScalarField mean_curvature_via_divergence() const;

  /// The two drift-diffusion forms of the height equation, evaluated from
  /// their definitions:
  ///   first:  (rho h^2)^{-1} div_g(rho h^2 grad_g u)
  ///   second: (h^2)^{-1} div_g(h^2 grad_g R(u)),  R an antiderivative of rho.
  /// Both equal multiples of (H cosh(theta) - script_H): m/h and m rho / h.
  std::pair<ScalarField, ScalarField> weighted_laplacian_forms() const;

  /// Min over nodes of the smallest eigenvalue of rho^2 sigma - g. The
  /// projection onto the base cannot shrink chart directions, so this is
  /// nonnegative up to roundoff.
  double projection_metric_comparison() const;

  /// Per-node dump: coordinates, u, H (normal route), H (divergence route),
  /// cosh_theta, margin, |H - H_alt|.
  void write_csv(std::ostream& out, const std::string& comment = {}) const;

private:
  SpacetimePtr spacetime_;
  ScalarField height_;
  StencilOrder order_;

  VectorField dheight_;      // chart components d_i u
  SymTensorField metric_;    // induced metric
  ScalarField margin_;
  ScalarField lambda_;       // 1 / cosh(theta)
  ScalarField cosh_theta_;
  std::array<Array, 3> normal_; // nodal ambient components of N
  Array h_, rho_, drho_;     // nodal h(x), rho(u), rho'(u)
};

/// Deterministic zero-mean trigonometric polynomial on the base, modes up to
/// max_mode per axis with quadratic spectral decay; |eval| <= 1 by
/// construction.
class GraphSampler {
public:
  GraphSampler(const BaseManifold& model, std::uint64_t seed, int max_mode);
  double eval(const BasePoint& p) const;

private:
  struct Mode {
    int k0, k1;
    double amplitude, phase;
  };
  std::array<double, 2> freq_{1.0, 1.0};
  double radius_ = 1.0;
  std::vector<Mode> modes_;
};

ScalarField slice_height(GridPtr grid, double t0);

/// Samples center + amplitude * sampler on the grid.
ScalarField sample_graph_height(GridPtr grid, const GraphSampler& sampler, double center,
                                double amplitude);

/// Largest amplitude <= initial for which the sampled graph stays inside the
/// time interval (with a small buffer) and keeps margin >= margin_floor;
/// halves until both hold.
double fit_amplitude(const SpacetimePtr& spacetime, const GridPtr& grid,
                     const GraphSampler& sampler, double initial, double margin_floor = 1e-6);

/// Random spacelike graph: modes <= n/4 (capped), quadratic decay, amplitude
/// fitted by fit_amplitude. Deterministic in (seed).
GraphHypersurface random_spacelike_graph(const SpacetimePtr& spacetime, const GridPtr& grid,
                                         std::uint64_t seed, double amplitude,
                                         double margin_floor = 1e-6);

/// Smooth compactly supported bump of the given height above the slice t0
/// (plane base): support radius must stay inside the trust region.
ScalarField bump_graph_height(GridPtr grid, double t0, double height, double radius,
                              const BasePoint& center = {});

/// Roughness of the height data: max over axes of the nested-stencil
/// derivative magnitudes up to max_order, floored at 1. Second-order
/// residuals scale with this factor, so tolerance bounds quote it.
double height_derivative_scale(const GraphHypersurface& surface, int max_order);

} // namespace dwarp
