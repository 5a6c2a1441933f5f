#pragma once

#include "dwarp/grid.hpp"

namespace dwarp {

enum class StencilOrder { Second = 2, Fourth = 4 };

/// Chart derivative of nodal values along one axis. Periodic axes use
/// centered wrap-around stencils; one-sided axes switch to biased stencils of
/// the same order at block edges. Requires at least 4 nodes per coordinate
/// (6 for fourth order).
Array axis_derivative(const BaseGrid& grid, const Array& vals, int axis,
                      StencilOrder order = StencilOrder::Second);

/// sigma-gradient: components sigma^{ij} d_j f in each node's chart frame.
VectorField grad_sigma(const ScalarField& f, StencilOrder order = StencilOrder::Second);

/// sigma-divergence: det^{-1/2} d_i (det^{1/2} V^i).
ScalarField div_sigma(const VectorField& v, StencilOrder order = StencilOrder::Second);

/// Quadrature against the model volume. Compact models integrate exactly
/// over the manifold; the plane requires the field to decay inside the
/// truncated chart and raises NonCompactBase otherwise.
double integrate(const ScalarField& f);

/// Integral of the geodesic circle of radius r about o (plane model only;
/// compact models are rejected with an injectivity-bound message). Field
/// values on the circle come from bilinear interpolation of the grid data.
double boundary_sphere_integral(const ScalarField& field, double r, const BasePoint& o,
                                int angular_samples = 512);

/// Same quadrature with an analytic integrand instead of nodal data.
double boundary_sphere_integral(const BaseManifold& model,
                                const std::function<double(const BasePoint&)>& f, double r,
                                const BasePoint& o, int angular_samples = 512);

/// Bilinear interpolation of nodal data at a chart point (single-chart
/// models).
double interpolate(const ScalarField& f, const BasePoint& p);

/// --- metric-field family -------------------------------------------------
/// The same stencil machinery applied against a per-node metric (e.g. the
/// metric induced on a graph hypersurface) instead of the model metric.

/// g-gradient: g^{ij} d_j f.
VectorField grad_metric(const ScalarField& f, const SymTensorField& g,
                        StencilOrder order = StencilOrder::Second);

/// g-divergence: det(g)^{-1/2} d_i (det(g)^{1/2} V^i).
ScalarField div_metric(const VectorField& v, const SymTensorField& g,
                       StencilOrder order = StencilOrder::Second);

/// Drift-diffusion operator w^{-1} div_g(w grad_g f) for a positive nodal
/// weight w.
ScalarField weighted_laplacian(const ScalarField& f, const ScalarField& weight,
                               const SymTensorField& g, StencilOrder order = StencilOrder::Second);

/// Christoffel symbols of a nodal metric, gamma[node][i](j,k), with the
/// metric derivatives taken by grid stencils.
std::vector<std::vector<Matrix>> metric_christoffels(const SymTensorField& g,
                                                     StencilOrder order = StencilOrder::Second);

/// Integral of f against the volume density of a nodal metric g.
double integrate_metric(const ScalarField& f, const SymTensorField& g);

} // namespace dwarp
