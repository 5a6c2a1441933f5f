#include "dwarp/warp.hpp"

#include "dwarp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dwarp {

namespace {

double poly_eval(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

} // namespace

WarpFunction WarpFunction::constant(double c, Interval domain) {
  WarpFunction w(Kind::Constant, domain);
  w.par_ = c;
  w.check_positive();
  return w;
}

WarpFunction WarpFunction::exponential(double rate, Interval domain) {
  WarpFunction w(Kind::Exponential, domain);
  w.par_ = rate;
  return w;
}

WarpFunction WarpFunction::hyperbolic_cosine(double rate, Interval domain) {
  WarpFunction w(Kind::HyperbolicCosine, domain);
  w.par_ = rate;
  w.check_positive();
  return w;
}

WarpFunction WarpFunction::polynomial(std::vector<double> coeffs, Interval domain) {
  WarpFunction w(Kind::Polynomial, domain);
  if (coeffs.empty()) throw ConfigError("polynomial warp needs at least one coefficient");
  w.coeffs_ = std::move(coeffs);
  w.check_positive();
  return w;
}

WarpFunction WarpFunction::tabulated(std::vector<double> ts, std::vector<double> values) {
  if (ts.size() != values.size() || ts.size() < 4) {
    throw ConfigError("tabulated warp needs matching t/value samples, at least 4");
  }
  if (!std::is_sorted(ts.begin(), ts.end())) {
    throw ConfigError("tabulated warp samples must be sorted in t");
  }
  WarpFunction w(Kind::Tabulated, Interval{ts.front(), ts.back()});
  w.table_t_ = std::move(ts);
  w.table_v_ = std::move(values);
  // Trapezoid antiderivative, re-centered at the midpoint below.
  w.table_antideriv_.resize(w.table_t_.size(), 0.0);
  for (std::size_t k = 1; k < w.table_t_.size(); ++k) {
    const double dt = w.table_t_[k] - w.table_t_[k - 1];
    w.table_antideriv_[k] =
        w.table_antideriv_[k - 1] + 0.5 * dt * (w.table_v_[k] + w.table_v_[k - 1]);
  }
  // Nodal slopes by centered differences (one-sided at the ends), linearly
  // interpolated by deriv(); keeps the derivative second order in the table
  // spacing away from cell boundaries of the raw interpolant.
  const std::size_t count = w.table_t_.size();
  w.table_deriv_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == count ? k : k + 1;
    w.table_deriv_[k] = (w.table_v_[hi] - w.table_v_[lo]) / (w.table_t_[hi] - w.table_t_[lo]);
  }
  w.check_positive();
  return w;
}

void WarpFunction::check_positive() const {
  const int samples = 512;
  for (int k = 0; k <= samples; ++k) {
    const double t = domain_.lo + (domain_.hi - domain_.lo) * k / samples;
    if (!(value(t) > 0.0)) {
      throw ConfigError("warp function must be positive on its domain");
    }
  }
}

double WarpFunction::value(double t) const {
  switch (kind_) {
    case Kind::Constant: return par_;
    case Kind::Exponential: return std::exp(par_ * t);
    case Kind::HyperbolicCosine: return std::cosh(par_ * t);
    case Kind::Polynomial: return poly_eval(coeffs_, t);
    case Kind::Tabulated: {
      const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), t);
      std::size_t k = std::min<std::size_t>(
          table_t_.size() - 1,
          std::max<std::size_t>(1, static_cast<std::size_t>(it - table_t_.begin())));
      const double s = (t - table_t_[k - 1]) / (table_t_[k] - table_t_[k - 1]);
      return (1.0 - s) * table_v_[k - 1] + s * table_v_[k];
    }
  }
  return 0.0;
}

double WarpFunction::deriv(double t) const {
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Exponential: return par_ * std::exp(par_ * t);
    case Kind::HyperbolicCosine: return par_ * std::sinh(par_ * t);
    case Kind::Polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * t + k * coeffs_[k];
      return acc;
    }
    case Kind::Tabulated: {
      const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), t);
      std::size_t k = std::min<std::size_t>(
          table_t_.size() - 1,
          std::max<std::size_t>(1, static_cast<std::size_t>(it - table_t_.begin())));
      const double s = (t - table_t_[k - 1]) / (table_t_[k] - table_t_[k - 1]);
      return (1.0 - s) * table_deriv_[k - 1] + s * table_deriv_[k];
    }
  }
  return 0.0;
}

double WarpFunction::antideriv(double t) const {
  const double t0 = reference_time();
  switch (kind_) {
    case Kind::Constant: return par_ * (t - t0);
    case Kind::Exponential:
      if (par_ == 0.0) return t - t0;
      return (std::exp(par_ * t) - std::exp(par_ * t0)) / par_;
    case Kind::HyperbolicCosine:
      if (par_ == 0.0) return t - t0;
      return (std::sinh(par_ * t) - std::sinh(par_ * t0)) / par_;
    case Kind::Polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 0;) {
        acc += coeffs_[k] * (std::pow(t, k + 1.0) - std::pow(t0, k + 1.0)) / (k + 1.0);
      }
      return acc;
    }
    case Kind::Tabulated: {
      auto raw = [&](double s) {
        const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), s);
        std::size_t k = std::min<std::size_t>(
            table_t_.size() - 1,
            std::max<std::size_t>(1, static_cast<std::size_t>(it - table_t_.begin())));
        const double a = s - table_t_[k - 1];
        const double va = value(table_t_[k - 1]);
        return table_antideriv_[k - 1] + 0.5 * a * (va + value(s));
      };
      return raw(t) - raw(t0);
    }
  }
  return 0.0;
}

bool WarpFunction::nondecreasing_on_domain(int samples, double tol) const {
  for (int k = 0; k <= samples; ++k) {
    const double t = domain_.lo + (domain_.hi - domain_.lo) * k / samples;
    if (deriv(t) < -tol) return false;
  }
  return true;
}

std::string WarpFunction::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Constant: out << "constant(" << par_ << ")"; break;
    case Kind::Exponential: out << "exp(rate=" << par_ << ")"; break;
    case Kind::HyperbolicCosine: out << "cosh(rate=" << par_ << ")"; break;
    case Kind::Polynomial: {
      out << "poly(";
      for (std::size_t k = 0; k < coeffs_.size(); ++k) out << (k ? "," : "") << coeffs_[k];
      out << ")";
      break;
    }
    case Kind::Tabulated: out << "tabulated(" << table_t_.size() << " samples)"; break;
  }
  out << " on (" << domain_.lo << "," << domain_.hi << ")";
  return out.str();
}

StaticPotential StaticPotential::constant(double c) {
  if (c <= 0.0) throw ConfigError("static potential must be positive");
  StaticPotential h(Kind::Constant);
  h.par0_ = c;
  return h;
}

StaticPotential StaticPotential::cosine_offset(const BaseManifold& model, double offset,
                                               double amplitude, int axis) {
  if (model.kind() != BaseKind::Circle && model.kind() != BaseKind::FlatTorus2) {
    throw ConfigError("cosine potential requires a circle or torus base");
  }
  if (offset <= std::abs(amplitude)) {
    throw ConfigError("cosine potential must stay positive: need offset > |amplitude|");
  }
  if (axis < 0 || axis >= model.dim()) throw ConfigError("cosine potential axis out of range");
  StaticPotential h(Kind::CosineOffset);
  h.par0_ = offset;
  h.par1_ = amplitude;
  h.axis_ = axis;
  const double period = model.kind() == BaseKind::Circle ? 2.0 * EIGEN_PI : model.period(axis);
  h.wavenumber_ = 2.0 * EIGEN_PI / period;
  return h;
}

StaticPotential StaticPotential::radial_exponential(double rate) {
  StaticPotential h(Kind::RadialExponential);
  h.par0_ = rate;
  return h;
}

StaticPotential StaticPotential::radial_power(double power) {
  StaticPotential h(Kind::RadialPower);
  h.par0_ = power;
  return h;
}

StaticPotential StaticPotential::tabulated(const ScalarField& values) {
  if (!(values.values.minCoeff() > 0.0)) {
    throw ConfigError("tabulated potential must be positive at all nodes");
  }
  StaticPotential h(Kind::Tabulated);
  h.table_ = std::make_shared<ScalarField>(values);
  auto grad = std::make_shared<VectorField>(values.grid_ptr());
  const int m = values.grid().model().dim();
  for (int a = 0; a < m; ++a) {
    grad->comp[a] = axis_derivative(values.grid(), values.values, a);
  }
  h.table_grad_ = std::move(grad);
  return h;
}

double StaticPotential::value(const BasePoint& p) const {
  switch (kind_) {
    case Kind::Constant: return par0_;
    case Kind::CosineOffset: return par0_ + par1_ * std::cos(wavenumber_ * p.coords[axis_]);
    case Kind::RadialExponential: return std::exp(par0_ * p.coords.norm());
    case Kind::RadialPower: return std::pow(1.0 + p.coords.squaredNorm(), par0_);
    case Kind::Tabulated: return interpolate(*table_, p);
  }
  return 0.0;
}

Vector StaticPotential::gradient(const BasePoint& p) const {
  switch (kind_) {
    case Kind::Constant: {
      return Vector::Zero(2);
    }
    case Kind::CosineOffset: {
      Vector g = Vector::Zero(2);
      g[axis_] = -par1_ * wavenumber_ * std::sin(wavenumber_ * p.coords[axis_]);
      return g;
    }
    case Kind::RadialExponential: {
      Vector g = Vector::Zero(2);
      const double r = p.coords.norm();
      if (r > 0.0) {
        const double f = par0_ * std::exp(par0_ * r) / r;
        g[0] = f * p.coords[0];
        g[1] = f * p.coords[1];
      }
      return g;
    }
    case Kind::RadialPower: {
      Vector g = Vector::Zero(2);
      const double base = 1.0 + p.coords.squaredNorm();
      const double f = 2.0 * par0_ * std::pow(base, par0_ - 1.0);
      g[0] = f * p.coords[0];
      g[1] = f * p.coords[1];
      return g;
    }
    case Kind::Tabulated: {
      Vector g = Vector::Zero(2);
      const int m = table_->grid().model().dim();
      for (int a = 0; a < m; ++a) {
        ScalarField comp(table_->grid_ptr(), table_grad_->comp[a]);
        g[a] = interpolate(comp, p);
      }
      return g;
    }
  }
  return Vector::Zero(2);
}

void StaticPotential::validate_for(const BaseManifold& model) const {
  switch (kind_) {
    case Kind::Constant: return;
    case Kind::CosineOffset:
      if (model.kind() != BaseKind::Circle && model.kind() != BaseKind::FlatTorus2) {
        throw ConfigError("cosine potential requires a circle or torus base");
      }
      return;
    case Kind::RadialExponential:
    case Kind::RadialPower:
      if (model.kind() != BaseKind::EuclideanPlane) {
        throw ConfigError("radial potentials require the plane base");
      }
      return;
    case Kind::Tabulated:
      if (table_->grid().model().kind() != model.kind()) {
        throw ConfigError("tabulated potential grid does not match the base model");
      }
      return;
  }
}

std::string StaticPotential::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Constant: out << "constant(" << par0_ << ")"; break;
    case Kind::CosineOffset:
      out << "cos-offset(offset=" << par0_ << ",amplitude=" << par1_ << ",axis=" << axis_ << ")";
      break;
    case Kind::RadialExponential: out << "radial-exp(rate=" << par0_ << ")"; break;
    case Kind::RadialPower: out << "radial-pow(power=" << par0_ << ")"; break;
    case Kind::Tabulated: out << "tabulated"; break;
  }
  return out.str();
}

} // namespace dwarp
