#pragma once

#include "dwarp/grid.hpp"

#include <optional>

namespace dwarp {

struct Interval {
  double lo;
  double hi;
  double mid() const { return 0.5 * (lo + hi); }
  double span() const { return hi - lo; }
  bool contains(double t) const { return t > lo && t < hi; }
};

/// Positive warp profile on an open time interval, with closed-form
/// derivative and antiderivative for the preset families. The antiderivative
/// is normalized to vanish at the interval midpoint. A tabulated fallback
/// (linear interpolation, centered finite differences, trapezoid
/// antiderivative) covers user-supplied profiles at second order.
class WarpFunction {
public:
  static WarpFunction constant(double c, Interval domain);
  /// exp(rate * t)
  static WarpFunction exponential(double rate, Interval domain);
  /// cosh(rate * t)
  static WarpFunction hyperbolic_cosine(double rate, Interval domain);
  /// coeffs[k] t^k, validated positive on the domain
  static WarpFunction polynomial(std::vector<double> coeffs, Interval domain);
  static WarpFunction tabulated(std::vector<double> ts, std::vector<double> values);

  double value(double t) const;
  double deriv(double t) const;
  /// Antiderivative with antideriv(reference_time()) == 0.
  double antideriv(double t) const;

  const Interval& domain() const { return domain_; }
  double reference_time() const { return domain_.mid(); }
  bool is_constant() const { return kind_ == Kind::Constant; }

  /// Dense scan for rho' >= -tol across the domain.
  bool nondecreasing_on_domain(int samples = 2048, double tol = 1e-12) const;

  std::string describe() const;

private:
  enum class Kind { Constant, Exponential, HyperbolicCosine, Polynomial, Tabulated };

  WarpFunction(Kind kind, Interval domain) : kind_(kind), domain_(domain) {}
  void check_positive() const;

  Kind kind_;
  Interval domain_;
  double par_ = 1.0;
  std::vector<double> coeffs_;
  std::vector<double> table_t_, table_v_, table_deriv_, table_antideriv_;
};

/// Positive potential on the base manifold with a chart gradient.
class StaticPotential {
public:
  static StaticPotential constant(double c);
  /// offset + amplitude * cos(2 pi x_axis / period); circle and torus bases.
  static StaticPotential cosine_offset(const BaseManifold& model, double offset, double amplitude,
                                       int axis = 0);
  /// exp(rate * |x|); plane base. The chart gradient has a conical point at
  /// the origin where it is set to zero.
  static StaticPotential radial_exponential(double rate);
  /// (1 + |x|^2)^power; plane base, smooth everywhere.
  static StaticPotential radial_power(double power);
  /// Nodal values on a grid; gradient by grid stencils, values off the
  /// lattice by linear interpolation.
  static StaticPotential tabulated(const ScalarField& values);

  double value(const BasePoint& p) const;
  /// Chart components of the gradient d_i h (not index-raised).
  Vector gradient(const BasePoint& p) const;

  bool is_constant() const { return kind_ == Kind::Constant; }
  /// Checks chart compatibility with a base model; throws ConfigError.
  void validate_for(const BaseManifold& model) const;

  std::string describe() const;

private:
  enum class Kind { Constant, CosineOffset, RadialExponential, RadialPower, Tabulated };

  explicit StaticPotential(Kind kind) : kind_(kind) {}

  Kind kind_;
  double par0_ = 1.0;
  double par1_ = 0.0;
  double wavenumber_ = 1.0;
  int axis_ = 0;
  std::shared_ptr<const ScalarField> table_;
  std::shared_ptr<const VectorField> table_grad_;
};

} // namespace dwarp
