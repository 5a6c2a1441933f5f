#include "dwarp/operators.hpp"

#include <doctest.h>

#include <cmath>

using namespace dwarp;

namespace {

GridPtr circle_grid(int n, double radius = 1.0) {
  return BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::circle(radius)), n);
}

GridPtr torus_grid(int n) {
  return BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::flat_torus()), n, n);
}

GridPtr plane_grid(int n, double width = 4.0) {
  return BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::euclidean_plane(width)), n);
}

GridPtr sphere_grid(int n) {
  return BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::round_sphere(1.0)), n);
}

double max_grad_error_sphere(int n) {
  // f = z-coordinate of the embedding; its sigma-gradient has chart
  // components +/- y / R.
  auto grid = sphere_grid(n);
  ScalarField f(grid);
  for (int node = 0; node < grid->node_count(); ++node) {
    const BasePoint p = grid->point(node);
    const double r2 = p.coords.squaredNorm();
    double z = (r2 - 1.0) / (r2 + 1.0);
    if (p.chart == 1) z = -z;
    f.values[node] = z;
  }
  const VectorField grad = grad_sigma(f);
  double worst = 0.0;
  for (int node = 0; node < grid->node_count(); ++node) {
    const BasePoint p = grid->point(node);
    const double sign = p.chart == 0 ? 1.0 : -1.0;
    worst = std::max(worst, std::abs(grad.comp[0][node] - sign * p.coords[0]));
    worst = std::max(worst, std::abs(grad.comp[1][node] - sign * p.coords[1]));
  }
  return worst;
}

} // namespace

TEST_CASE("gradient of a constant field vanishes") {
  auto grid = circle_grid(32);
  ScalarField f(grid);
  f.values.setConstant(3.7);
  const VectorField grad = grad_sigma(f);
  CHECK(grad.comp[0].abs().maxCoeff() == 0.0);
}

TEST_CASE("gradient of sin on the unit circle") {
  auto grid = circle_grid(64);
  const double spacing = grid->spacing(0);
  ScalarField f(grid);
  for (int i = 0; i < grid->node_count(); ++i) f.values[i] = std::sin(grid->point(i).coords[0]);
  const VectorField grad = grad_sigma(f);
  double worst = 0.0;
  for (int i = 0; i < grid->node_count(); ++i) {
    worst = std::max(worst, std::abs(grad.comp[0][i] - std::cos(grid->point(i).coords[0])));
  }
  CHECK(worst <= spacing * spacing);
}

TEST_CASE("gradient on the torus keeps the unused component zero") {
  auto grid = torus_grid(32);
  ScalarField f(grid);
  for (int i = 0; i < grid->node_count(); ++i) f.values[i] = std::sin(grid->point(i).coords[0]);
  const VectorField grad = grad_sigma(f);
  double worst = 0.0;
  for (int i = 0; i < grid->node_count(); ++i) {
    worst = std::max(worst, std::abs(grad.comp[0][i] - std::cos(grid->point(i).coords[0])));
  }
  CHECK(worst <= grid->spacing(0) * grid->spacing(0));
  CHECK(grad.comp[1].abs().maxCoeff() <= 1e-14);
}

TEST_CASE("divergence of the zero field vanishes") {
  auto grid = torus_grid(16);
  VectorField v(grid);
  CHECK(div_sigma(v).values.abs().maxCoeff() == 0.0);
}

TEST_CASE("divergence of grad sin is minus sin on the unit circle") {
  auto grid = circle_grid(96);
  ScalarField f(grid);
  for (int i = 0; i < grid->node_count(); ++i) f.values[i] = std::sin(grid->point(i).coords[0]);
  const ScalarField lap = div_sigma(grad_sigma(f));
  double worst = 0.0;
  for (int i = 0; i < grid->node_count(); ++i) {
    worst = std::max(worst, std::abs(lap.values[i] + std::sin(grid->point(i).coords[0])));
  }
  CHECK(worst <= 4.0 * grid->spacing(0) * grid->spacing(0));
}

TEST_CASE("divergence of the radial field on the plane is 2") {
  auto grid = plane_grid(33);
  VectorField v(grid);
  for (int i = 0; i < grid->node_count(); ++i) {
    const BasePoint p = grid->point(i);
    v.comp[0][i] = p.coords[0];
    v.comp[1][i] = p.coords[1];
  }
  const ScalarField div = div_sigma(v);
  CHECK((div.values - 2.0).abs().maxCoeff() <= 1e-11);
}

TEST_CASE("derivative stencils converge at second order or better") {
  auto residual_circle = [](int n) {
    auto grid = circle_grid(n);
    ScalarField f(grid);
    for (int i = 0; i < grid->node_count(); ++i) {
      f.values[i] = std::sin(2.0 * grid->point(i).coords[0]);
    }
    const VectorField grad = grad_sigma(f);
    double worst = 0.0;
    for (int i = 0; i < grid->node_count(); ++i) {
      worst = std::max(worst,
                       std::abs(grad.comp[0][i] - 2.0 * std::cos(2.0 * grid->point(i).coords[0])));
    }
    return worst;
  };
  const double ratio = residual_circle(48) / residual_circle(96);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);

  const double sphere_ratio = max_grad_error_sphere(33) / max_grad_error_sphere(65);
  CHECK(sphere_ratio >= 3.4);
  CHECK(sphere_ratio <= 4.6);
}

TEST_CASE("fourth order stencils beat second order and converge at order 4") {
  auto err = [](int n, StencilOrder order) {
    auto grid = circle_grid(n);
    ScalarField f(grid);
    for (int i = 0; i < grid->node_count(); ++i) {
      f.values[i] = std::sin(3.0 * grid->point(i).coords[0]);
    }
    const VectorField grad = grad_sigma(f, order);
    double worst = 0.0;
    for (int i = 0; i < grid->node_count(); ++i) {
      worst = std::max(worst, std::abs(grad.comp[0][i] -
                                       3.0 * std::cos(3.0 * grid->point(i).coords[0])));
    }
    return worst;
  };
  CHECK(err(48, StencilOrder::Fourth) <= 0.05 * err(48, StencilOrder::Second));
  const double ratio = err(48, StencilOrder::Fourth) / err(96, StencilOrder::Fourth);
  CHECK(ratio >= 14.0);
  CHECK(ratio <= 18.0);
}

TEST_CASE("coarse grids are rejected") {
  auto grid = circle_grid(3);
  ScalarField f(grid);
  CHECK_THROWS_AS((void)grad_sigma(f), std::invalid_argument);
}

TEST_CASE("integration recovers total measures and parities") {
  {
    ScalarField one(circle_grid(64));
    one.values.setConstant(1.0);
    CHECK(integrate(one) == doctest::Approx(2.0 * EIGEN_PI).epsilon(1e-12));
  }
  {
    ScalarField one(sphere_grid(65));
    one.values.setConstant(1.0);
    CHECK(integrate(one) == doctest::Approx(4.0 * EIGEN_PI).epsilon(2e-4));
  }
  {
    auto grid = circle_grid(64);
    ScalarField f(grid);
    for (int i = 0; i < grid->node_count(); ++i) f.values[i] = std::sin(grid->point(i).coords[0]);
    CHECK(std::abs(integrate(f)) <= 1e-12);
  }
}

TEST_CASE("integration on the plane needs a decaying field") {
  auto grid = plane_grid(33);
  ScalarField one(grid);
  one.values.setConstant(1.0);
  CHECK_THROWS_AS((void)integrate(one), NonCompactBase);

  ScalarField bump(grid);
  for (int i = 0; i < grid->node_count(); ++i) {
    const double r2 = grid->point(i).coords.squaredNorm();
    bump.values[i] = std::exp(-4.0 * r2);
  }
  CHECK(integrate(bump) == doctest::Approx(EIGEN_PI / 4.0).epsilon(1e-6));
}

TEST_CASE("discrete divergence theorem on compact models") {
  // Periodic lattice: central stencils telescope, so the defect is roundoff.
  auto grid = torus_grid(24);
  VectorField v(grid);
  for (int i = 0; i < grid->node_count(); ++i) {
    const BasePoint p = grid->point(i);
    v.comp[0][i] = std::sin(p.coords[0]) * std::cos(2.0 * p.coords[1]);
    v.comp[1][i] = std::cos(p.coords[0] + p.coords[1]);
  }
  CHECK(std::abs(integrate(div_sigma(v))) <= 1e-12);

  // Two-chart sphere: the blended quadrature of the smooth defect field
  // cancels far below the naive second-order estimate.
  auto defect = [](int n) {
    auto sgrid = sphere_grid(n);
    ScalarField f(sgrid);
    for (int i = 0; i < sgrid->node_count(); ++i) {
      const BasePoint p = sgrid->point(i);
      const double r2 = p.coords.squaredNorm();
      double z = (r2 - 1.0) / (r2 + 1.0);
      if (p.chart == 1) z = -z;
      f.values[i] = z;
    }
    return std::abs(integrate(div_sigma(grad_sigma(f))));
  };
  CHECK(defect(41) <= 1e-12);
  CHECK(defect(81) <= 1e-12);
}

TEST_CASE("geodesic circle quadrature on the plane") {
  auto grid = plane_grid(257, 5.0);
  ScalarField one(grid);
  one.values.setConstant(1.0);
  CHECK(boundary_sphere_integral(one, 1.0, BasePoint{}) ==
        doctest::Approx(2.0 * EIGEN_PI).epsilon(1e-9));
  CHECK(boundary_sphere_integral(one, 3.0, BasePoint{}) ==
        doctest::Approx(6.0 * EIGEN_PI).epsilon(1e-9));

  ScalarField grow(grid);
  for (int i = 0; i < grid->node_count(); ++i) {
    grow.values[i] = std::exp(2.0 * grid->point(i).coords.norm());
  }
  const double expected = 2.0 * EIGEN_PI * std::exp(2.0);
  CHECK(boundary_sphere_integral(grow, 1.0, BasePoint{}) ==
        doctest::Approx(expected).epsilon(1e-3));

  // Exact-integrand overload carries no interpolation error.
  CHECK(boundary_sphere_integral(grid->model(),
                                 [](const BasePoint& p) { return std::exp(2.0 * p.coords.norm()); },
                                 1.0, BasePoint{}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("geodesic circle quadrature rejects compact models") {
  ScalarField f(circle_grid(16));
  CHECK_THROWS_WITH_AS((void)boundary_sphere_integral(f, 0.5, BasePoint{}),
                       doctest::Contains("injectivity"), std::invalid_argument);
}

TEST_CASE("metric-field operators reduce to the model operators on sigma") {
  auto grid = sphere_grid(41);
  SymTensorField g(grid);
  ScalarField f(grid);
  for (int i = 0; i < grid->node_count(); ++i) {
    g.set(i, grid->model().metric_at(grid->point(i)));
    const BasePoint p = grid->point(i);
    const double r2 = p.coords.squaredNorm();
    double z = (r2 - 1.0) / (r2 + 1.0);
    if (p.chart == 1) z = -z;
    f.values[i] = z;
  }
  const VectorField a = grad_sigma(f);
  const VectorField b = grad_metric(f, g);
  for (int c = 0; c < 2; ++c) {
    CHECK((a.comp[c] - b.comp[c]).abs().maxCoeff() <= 1e-12);
  }

  // Stencil Christoffels of the sampled metric match the analytic symbols.
  const auto gamma = metric_christoffels(g);
  double worst = 0.0;
  for (int i = 0; i < grid->node_count(); ++i) {
    const auto analytic = grid->model().christoffels_at(grid->point(i));
    for (int k = 0; k < 2; ++k) {
      worst = std::max(worst, (gamma[i][k] - analytic[k]).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 20.0 * grid->spacing(0) * grid->spacing(0));
}
