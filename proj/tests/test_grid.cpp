#include "dwarp/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace dwarp;

namespace {

constexpr double kTwoPi = 2.0 * EIGEN_PI;

double weight_sum(const BaseGrid& grid) {
  double acc = 0.0;
  for (int node = 0; node < grid.node_count(); ++node) acc += grid.weight(node);
  return acc;
}

} // namespace

TEST_CASE("metric is symmetric positive definite with the documented floor") {
  const auto models = {BaseManifold::circle(1.3), BaseManifold::flat_torus(),
                       BaseManifold::round_sphere(1.0), BaseManifold::euclidean_plane(4.0)};
  for (const auto& model : models) {
    auto grid = BaseGrid::make(std::make_shared<BaseManifold>(model), 17);
    for (int node = 0; node < grid->node_count(); node += 3) {
      const Matrix sigma = model.metric_at(grid->point(node));
      CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Matrix> eigs(sigma);
      CHECK(eigs.eigenvalues().minCoeff() >= model.eigenvalue_floor() * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("metric derivatives agree with central differences of the metric") {
  const auto sphere = BaseManifold::round_sphere(1.4);
  const BasePoint p = BasePoint::of(0.31, -0.77);
  const auto analytic = sphere.metric_deriv_at(p);
  for (double h : {1e-4, 5e-5}) {
    for (int k = 0; k < 2; ++k) {
      BasePoint pp = p, pm = p;
      pp.coords[k] += h;
      pm.coords[k] -= h;
      const Matrix fd = (sphere.metric_at(pp) - sphere.metric_at(pm)) / (2.0 * h);
      CHECK((fd - analytic[k]).cwiseAbs().maxCoeff() <= 10.0 * h * h);
    }
  }
}

TEST_CASE("compactness flags") {
  CHECK(BaseManifold::circle().compact());
  CHECK(BaseManifold::flat_torus().compact());
  CHECK(BaseManifold::round_sphere().compact());
  CHECK_FALSE(BaseManifold::euclidean_plane().compact());
}

TEST_CASE("periodic coordinates reduce to the fundamental domain") {
  const auto circle = BaseManifold::circle();
  CHECK(circle.reduce(BasePoint::of(kTwoPi + 0.25)).coords[0] == doctest::Approx(0.25));
  CHECK(circle.reduce(BasePoint::of(-0.25)).coords[0] == doctest::Approx(kTwoPi - 0.25));

  const auto torus = BaseManifold::flat_torus(2.0, 3.0);
  const BasePoint q = torus.reduce(BasePoint::of(2.5, -0.5));
  CHECK(q.coords[0] == doctest::Approx(0.5));
  CHECK(q.coords[1] == doctest::Approx(2.5));
}

TEST_CASE("periodic grids tile without a duplicated seam node") {
  auto grid = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::circle()), 16);
  std::set<long> seen;
  for (int node = 0; node < grid->node_count(); ++node) {
    const double phi = grid->point(node).coords[0];
    CHECK(phi >= 0.0);
    CHECK(phi < kTwoPi - 1e-12);
    seen.insert(std::lround(phi * 1e12));
  }
  CHECK(static_cast<int>(seen.size()) == grid->node_count());
}

TEST_CASE("quadrature weights recover total volumes") {
  auto circle = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::circle(2.0)), 64);
  CHECK(weight_sum(*circle) == doctest::Approx(2.0 * kTwoPi).epsilon(1e-10));

  auto torus = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::flat_torus(2.0, 5.0)),
                              24, 40);
  CHECK(weight_sum(*torus) == doctest::Approx(10.0).epsilon(1e-10));

  auto sphere = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::round_sphere(1.0)),
                               65);
  CHECK(weight_sum(*sphere) == doctest::Approx(4.0 * EIGEN_PI).epsilon(2e-4));

  auto sphere2 = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::round_sphere(0.7)),
                                65);
  CHECK(weight_sum(*sphere2) == doctest::Approx(4.0 * EIGEN_PI * 0.49).epsilon(2e-4));
}

TEST_CASE("sphere chart transition is involutive and metric compatible") {
  const auto sphere = BaseManifold::round_sphere(1.2);
  for (const auto& coords : {std::pair{0.9, 0.4}, std::pair{-1.3, 0.2}, std::pair{1.1, -1.2}}) {
    const BasePoint p = BasePoint::of(coords.first, coords.second, 0);
    const BasePoint q = sphere.to_other_chart(p);
    CHECK(q.chart == 1);
    const BasePoint back = sphere.to_other_chart(q);
    CHECK(back.coords[0] == doctest::Approx(p.coords[0]).epsilon(1e-12));
    CHECK(back.coords[1] == doctest::Approx(p.coords[1]).epsilon(1e-12));

    // Pullback of the other chart's metric through the transition equals the
    // own-chart metric.
    const Matrix jac = sphere.chart_transition_jacobian(p);
    const Matrix pulled = jac.transpose() * sphere.metric_at(q) * jac;
    CHECK((pulled - sphere.metric_at(p)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("plane trust region excludes the outer stencil band") {
  auto grid = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::euclidean_plane(3.0)),
                             21);
  int trusted = 0;
  for (int node = 0; node < grid->node_count(); ++node) {
    if (grid->trusted(node)) ++trusted;
  }
  CHECK(trusted == 13 * 13);

  auto circle = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::circle()), 12);
  for (int node = 0; node < circle->node_count(); ++node) CHECK(circle->trusted(node));
}

TEST_CASE("neighbors wrap on periodic axes and stop at one-sided edges") {
  auto circle = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::circle()), 8);
  CHECK(circle->neighbor(0, 0, -1) == 7);
  CHECK(circle->neighbor(7, 0, 1) == 0);

  auto plane = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::euclidean_plane(1.0)),
                              9);
  CHECK(plane->neighbor(0, 0, -1) == -1);
  CHECK(plane->neighbor(0, 1, -1) == -1);
  CHECK(plane->neighbor(0, 0, 1) == 1);
}

TEST_CASE("field containers enforce shape invariants") {
  auto grid = BaseGrid::make(std::make_shared<BaseManifold>(BaseManifold::flat_torus()), 8, 8);
  ScalarField f(grid);
  CHECK(f.size() == grid->node_count());

  SymTensorField g(grid);
  Matrix value(2, 2);
  value << 2.0, 0.3, 0.3, 1.0;
  g.set(5, value);
  CHECK((g.at(5) - value).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.eigen_min(5, 2) == doctest::Approx(1.5 - std::sqrt(0.25 + 0.09)));
}
