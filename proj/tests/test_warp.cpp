#include "dwarp/warp.hpp"

#include <doctest.h>

#include <cmath>

using namespace dwarp;

namespace {

void check_derivative_consistency(const WarpFunction& warp) {
  const Interval& I = warp.domain();
  for (int k = 1; k < 12; ++k) {
    const double t = I.lo + I.span() * k / 12.0;
    const double h = 1e-5 * I.span();
    const double fd = (warp.value(t + h) - warp.value(t - h)) / (2.0 * h);
    CHECK(warp.deriv(t) == doctest::Approx(fd).epsilon(1e-7));
    const double fd_anti = (warp.antideriv(t + h) - warp.antideriv(t - h)) / (2.0 * h);
    CHECK(warp.value(t) == doctest::Approx(fd_anti).epsilon(1e-7));
  }
}

} // namespace

TEST_CASE("warp presets: values, derivatives, antiderivatives") {
  const Interval I{0.0, 2.0};
  check_derivative_consistency(WarpFunction::constant(1.5, I));
  check_derivative_consistency(WarpFunction::exponential(1.0, I));
  check_derivative_consistency(WarpFunction::hyperbolic_cosine(0.7, {-1.0, 1.0}));
  check_derivative_consistency(WarpFunction::polynomial({1.0, 0.0, 1.0}, {-2.0, 2.0}));

  const WarpFunction exp_warp = WarpFunction::exponential(2.0, I);
  CHECK(exp_warp.value(0.5) == doctest::Approx(std::exp(1.0)));
  CHECK(exp_warp.deriv(0.5) == doctest::Approx(2.0 * std::exp(1.0)));
}

TEST_CASE("antiderivative is anchored at the interval midpoint") {
  for (const auto& warp :
       {WarpFunction::exponential(1.0, {0.0, 2.0}),
        WarpFunction::polynomial({1.0, 0.5, 0.25}, {0.0, 4.0}),
        WarpFunction::hyperbolic_cosine(1.0, {-1.0, 1.0})}) {
    CHECK(std::abs(warp.antideriv(warp.reference_time())) <= 1e-15);
  }
  // Constant warp: antiderivative reduces to t - t_ref.
  const WarpFunction c = WarpFunction::constant(1.0, {-2.0, 2.0});
  CHECK(c.antideriv(1.25) == doctest::Approx(1.25));
}

TEST_CASE("positivity is validated on the domain") {
  CHECK_THROWS_AS(WarpFunction::constant(-1.0, {0.0, 1.0}), ConfigError);
  // t^2 - 1 changes sign inside (-2, 2).
  CHECK_THROWS_AS(WarpFunction::polynomial({-1.0, 0.0, 1.0}, {-2.0, 2.0}), ConfigError);
}

TEST_CASE("monotonicity scan") {
  CHECK(WarpFunction::constant(1.0, {0.0, 1.0}).nondecreasing_on_domain());
  CHECK(WarpFunction::exponential(1.0, {0.0, 1.0}).nondecreasing_on_domain());
  CHECK_FALSE(WarpFunction::hyperbolic_cosine(1.0, {-1.0, 1.0}).nondecreasing_on_domain());
  CHECK(WarpFunction::hyperbolic_cosine(1.0, {0.1, 1.0}).nondecreasing_on_domain());
}

TEST_CASE("tabulated warp approximates its source at second order") {
  auto table = [](int samples) {
    std::vector<double> ts, vs;
    for (int k = 0; k <= samples; ++k) {
      const double t = 2.0 * k / samples;
      ts.push_back(t);
      vs.push_back(std::exp(t));
    }
    return WarpFunction::tabulated(ts, vs);
  };
  auto max_errors = [](const WarpFunction& warp) {
    double value_err = 0.0, deriv_err = 0.0;
    for (int k = 0; k < 500; ++k) {
      const double t = 0.1 + 1.8 * k / 499.0;
      value_err = std::max(value_err, std::abs(warp.value(t) - std::exp(t)));
      deriv_err = std::max(deriv_err, std::abs(warp.deriv(t) - std::exp(t)));
    }
    return std::pair{value_err, deriv_err};
  };
  const auto [coarse_val, coarse_der] = max_errors(table(64));
  const auto [fine_val, fine_der] = max_errors(table(128));
  CHECK(coarse_val <= 1e-3);
  CHECK(fine_val <= 0.3 * coarse_val);
  CHECK(coarse_der <= 5e-3);
  CHECK(fine_der <= 0.35 * coarse_der);
  const WarpFunction warp = table(64);
  CHECK(warp.antideriv(warp.reference_time()) == doctest::Approx(0.0));
}

TEST_CASE("potential presets: values and gradients") {
  const auto circle = BaseManifold::circle();
  const StaticPotential cospot = StaticPotential::cosine_offset(circle, 2.0, 1.0);
  CHECK(cospot.value(BasePoint::of(0.0)) == doctest::Approx(3.0));
  CHECK(cospot.value(BasePoint::of(EIGEN_PI)) == doctest::Approx(1.0));
  CHECK(cospot.gradient(BasePoint::of(0.5))[0] == doctest::Approx(-std::sin(0.5)));

  const StaticPotential pow = StaticPotential::radial_power(0.25);
  const BasePoint p = BasePoint::of(0.6, -0.9);
  for (int k = 0; k < 2; ++k) {
    BasePoint pp = p, pm = p;
    pp.coords[k] += 1e-6;
    pm.coords[k] -= 1e-6;
    const double fd = (pow.value(pp) - pow.value(pm)) / 2e-6;
    CHECK(pow.gradient(p)[k] == doctest::Approx(fd).epsilon(1e-7));
  }

  const StaticPotential rexp = StaticPotential::radial_exponential(1.0);
  CHECK(rexp.value(BasePoint::of(0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(rexp.value(BasePoint::of(3.0, 4.0)) == doctest::Approx(std::exp(5.0)));
  CHECK(rexp.gradient(BasePoint::of(0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("potential positivity and chart compatibility are validated") {
  const auto circle = BaseManifold::circle();
  CHECK_THROWS_AS(StaticPotential::constant(0.0), ConfigError);
  CHECK_THROWS_AS(StaticPotential::cosine_offset(circle, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(StaticPotential::cosine_offset(BaseManifold::euclidean_plane(), 2.0, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(StaticPotential::radial_exponential(1.0).validate_for(circle), ConfigError);
  CHECK_NOTHROW(StaticPotential::constant(2.0).validate_for(circle));
}

TEST_CASE("tabulated potential interpolates nodal data") {
  auto grid = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::circle()), 64);
  ScalarField values(grid);
  for (int i = 0; i < grid->node_count(); ++i) {
    values.values[i] = 2.0 + std::cos(grid->point(i).coords[0]);
  }
  const StaticPotential h = StaticPotential::tabulated(values);
  CHECK(h.value(BasePoint::of(0.75)) == doctest::Approx(2.0 + std::cos(0.75)).epsilon(1e-3));
  CHECK(h.gradient(BasePoint::of(0.75))[0] == doctest::Approx(-std::sin(0.75)).epsilon(1e-2));
}
