#pragma once

#include "dwarp/lie_transport.hpp"
#include "dwarp/warp.hpp"

namespace dwarp {

/// A point (t, x) of the product spacetime.
struct AmbientPoint {
  double t = 0.0;
  BasePoint x;
};

/// Conformal-field scalars at a point: the field norm alpha = h rho, the
/// conformal factor eta = rho', and their ratio script_H = eta / alpha (the
/// mean curvature of the time slices).
struct ConformalData {
  double alpha = 0.0;
  double eta = 0.0;
  double script_H = 0.0;
};

struct SliceGeometry {
  /// Max over nodes of the gap between the slice's second fundamental form
  /// and its umbilic value script_H * g (closed-form derivatives, so this is
  /// roundoff only).
  double umbilicity_defect = 0.0;
  ScalarField mean_curvature;
};

/// Lorentzian product of an open interval and a Riemannian base, warped on
/// both factors:
///
///   gbar = -h(x)^2 dt^2 + rho(t)^2 sigma.
///
/// Ambient index 0 is time; indices 1..m are the base chart coordinates.
/// The timelike field rho d_t is conformal with factor rho'; slices
/// {t} x P are umbilic with mean curvature script_H = rho' / (rho h) toward
/// the future normal.
class DoublyWarpedSpacetime {
public:
  DoublyWarpedSpacetime(std::shared_ptr<const BaseManifold> base, WarpFunction warp,
                        StaticPotential potential, bool monotone = false);

  const BaseManifold& base() const { return *base_; }
  std::shared_ptr<const BaseManifold> base_ptr() const { return base_; }
  const WarpFunction& warp() const { return warp_; }
  const StaticPotential& potential() const { return potential_; }
  const Interval& interval() const { return warp_.domain(); }
  bool monotone() const { return monotone_; }
  int ambient_dim() const { return base_->dim() + 1; }

  void check_point(const AmbientPoint& p) const;

  /// Block metric: gbar_00 = -h^2, gbar_ij = rho^2 sigma_ij.
  Matrix ambient_metric_at(const AmbientPoint& p) const;
  Matrix ambient_metric_inverse_at(const AmbientPoint& p) const;

  /// Closed-form Christoffel symbols, gamma[mu](nu, lambda).
  std::vector<Matrix> christoffels_at(const AmbientPoint& p) const;

  /// The conformal field rho d_t (ambient components) and its scalars.
  std::pair<Vector, ConformalData> conformal_field_at(const AmbientPoint& p) const;

  double script_H(double t, const BasePoint& x) const;

  /// Flow-transport check of the conformal equation L_X gbar = 2 rho' gbar;
  /// returns the max-norm residual at p. The Lie derivative is built from
  /// the numerically integrated flow of the field, never from closed-form
  /// frame identities.
  double lie_derivative_residual(const AmbientPoint& p, LieProbeSettings settings = {}) const;

  /// Geometry of the slice {t0} x P sampled on a grid: the umbilicity defect
  /// and the slice mean curvature field rho'(t0) / (rho(t0) h(x)).
  SliceGeometry slice_geometry(double t0, const GridPtr& grid) const;

  std::string describe() const;

private:
  std::shared_ptr<const BaseManifold> base_;
  WarpFunction warp_;
  StaticPotential potential_;
  bool monotone_;
};

using SpacetimePtr = std::shared_ptr<const DoublyWarpedSpacetime>;

} // namespace dwarp
