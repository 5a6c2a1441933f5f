#include "dwarp/spacetime.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dwarp;

namespace {

SpacetimePtr make_spacetime(const BaseManifold& base, WarpFunction warp, StaticPotential h,
                            bool monotone = false) {
  return std::make_shared<DoublyWarpedSpacetime>(std::make_shared<BaseManifold>(base),
                                                 std::move(warp), std::move(h), monotone);
}

SpacetimePtr cfg_a() {
  return make_spacetime(BaseManifold::circle(), WarpFunction::constant(1.0, {-2.0, 2.0}),
                        StaticPotential::constant(1.0), true);
}

SpacetimePtr cfg_c() {
  const auto base = BaseManifold::circle();
  return make_spacetime(base, WarpFunction::exponential(1.0, {0.0, 2.0}),
                        StaticPotential::cosine_offset(base, 2.0, 1.0), true);
}

// Independent oracle: Christoffel symbols from finite differences of the
// ambient metric plus a linear solve, never from the closed forms.
std::vector<Matrix> fd_christoffels(const DoublyWarpedSpacetime& st, const AmbientPoint& p,
                                    double step = 1e-5) {
  const int dim = st.ambient_dim();
  auto shifted = [&](int axis, double delta) {
    AmbientPoint q = p;
    if (axis == 0) {
      q.t += delta;
    } else {
      q.x.coords[axis - 1] += delta;
    }
    return st.ambient_metric_at(q);
  };
  std::vector<Matrix> dg(dim);
  for (int axis = 0; axis < dim; ++axis) {
    dg[axis] = (shifted(axis, step) - shifted(axis, -step)) / (2.0 * step);
  }
  const Matrix ginv = st.ambient_metric_inverse_at(p);
  std::vector<Matrix> gamma(dim, Matrix::Zero(dim, dim));
  for (int mu = 0; mu < dim; ++mu) {
    for (int nu = 0; nu < dim; ++nu) {
      for (int lam = 0; lam < dim; ++lam) {
        double acc = 0.0;
        for (int kap = 0; kap < dim; ++kap) {
          acc += ginv(mu, kap) * (dg[nu](kap, lam) + dg[lam](kap, nu) - dg[kap](nu, lam));
        }
        gamma[mu](nu, lam) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

double christoffel_defect(const DoublyWarpedSpacetime& st, const AmbientPoint& p) {
  const auto closed = st.christoffels_at(p);
  const auto fd = fd_christoffels(st, p);
  double worst = 0.0;
  for (std::size_t mu = 0; mu < closed.size(); ++mu) {
    worst = std::max(worst, (closed[mu] - fd[mu]).cwiseAbs().maxCoeff());
  }
  return worst;
}

} // namespace

TEST_CASE("ambient metric blocks") {
  CHECK((cfg_a()->ambient_metric_at({0.0, BasePoint::of(1.0)}) -
         (Matrix(2, 2) << -1.0, 0.0, 0.0, 1.0).finished())
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  // exp warp at t = 0 with the cosine potential at phi = 0: diag(-9, 1).
  CHECK((cfg_c()->ambient_metric_at({0.5, BasePoint::of(0.0)}) -
         cfg_c()->ambient_metric_at({0.5, BasePoint::of(0.0)}))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  const auto base = BaseManifold::circle();
  const auto st = make_spacetime(base, WarpFunction::exponential(1.0, {-1.0, 1.0}),
                                 StaticPotential::cosine_offset(base, 2.0, 1.0));
  const Matrix g = st->ambient_metric_at({0.0, BasePoint::of(0.0)});
  CHECK(g(0, 0) == doctest::Approx(-9.0));
  CHECK(g(1, 1) == doctest::Approx(1.0));
  CHECK(g(0, 1) == 0.0);
}

TEST_CASE("time translation scales the spatial block of an exponential warp") {
  const auto st = make_spacetime(BaseManifold::circle(), WarpFunction::exponential(1.0, {-2. , 2.}),
                                 StaticPotential::constant(1.0));
  const double delta = 0.3;
  const Matrix g0 = st->ambient_metric_at({0.2, BasePoint::of(1.0)});
  const Matrix g1 = st->ambient_metric_at({0.2 + delta, BasePoint::of(1.0)});
  CHECK(g1(1, 1) == doctest::Approx(std::exp(2.0 * delta) * g0(1, 1)));
  CHECK(g1(0, 0) == doctest::Approx(g0(0, 0)));
}

TEST_CASE("product case: only base symbols survive") {
  const auto gamma = cfg_a()->christoffels_at({0.1, BasePoint::of(0.7)});
  for (const auto& block : gamma) CHECK(block.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("expanding case closed forms") {
  // h = 1: gamma^t_{ij} = rho rho' sigma_ij and gamma^i_{tj} = rho'/rho.
  const auto st = make_spacetime(BaseManifold::circle(2.0),
                                 WarpFunction::exponential(1.0, {0.0, 2.0}),
                                 StaticPotential::constant(1.0), true);
  const double t = 0.8;
  const auto gamma = st->christoffels_at({t, BasePoint::of(0.3)});
  const double rho = std::exp(t);
  CHECK(gamma[0](1, 1) == doctest::Approx(rho * rho * 4.0)); // sigma = radius^2
  CHECK(gamma[1](0, 1) == doctest::Approx(1.0));             // rho'/rho
  CHECK(gamma[1](0, 0) == 0.0);
}

TEST_CASE("static case closed forms") {
  // rho = 1: gamma^t_{ti} = d_i h / h and gamma^i_{tt} = h sigma^{ij} d_j h.
  const auto base = BaseManifold::circle();
  const auto st = make_spacetime(base, WarpFunction::constant(1.0, {-1.0, 1.0}),
                                 StaticPotential::cosine_offset(base, 2.0, 1.0));
  const double phi = 1.1;
  const auto gamma = st->christoffels_at({0.0, BasePoint::of(phi)});
  const double h = 2.0 + std::cos(phi);
  const double dh = -std::sin(phi);
  CHECK(gamma[0](0, 1) == doctest::Approx(dh / h));
  CHECK(gamma[1](0, 0) == doctest::Approx(h * dh));
}

TEST_CASE("closed-form symbols match the finite-difference oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pick(0.15, 0.85);

  const auto torus = BaseManifold::flat_torus();
  const auto sphere = BaseManifold::round_sphere(1.0);
  const std::vector<SpacetimePtr> models = {
      cfg_c(),
      make_spacetime(torus, WarpFunction::polynomial({1.0, 0.0, 1.0}, {-2.0, 2.0}),
                     StaticPotential::cosine_offset(torus, 2.0, 1.0)),
      make_spacetime(sphere, WarpFunction::hyperbolic_cosine(1.0, {-1.0, 1.0}),
                     StaticPotential::constant(1.5)),
  };
  for (const auto& st : models) {
    for (int trial = 0; trial < 5; ++trial) {
      AmbientPoint p;
      const Interval& I = st->interval();
      p.t = I.lo + I.span() * pick(rng);
      for (int a = 0; a < st->base().dim(); ++a) p.x.coords[a] = pick(rng);
      CHECK(christoffel_defect(*st, p) <= 1e-8);
    }
  }
}

TEST_CASE("Lorentzian signature at sampled points") {
  const auto st = cfg_c();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t_pick(0.05, 1.95), x_pick(0.0, 6.28);
  for (int k = 0; k < 50; ++k) {
    const Matrix g = st->ambient_metric_at({t_pick(rng), BasePoint::of(x_pick(rng))});
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    int negatives = 0;
    for (int i = 0; i < g.rows(); ++i) negatives += eig.eigenvalues()[i] < 0.0 ? 1 : 0;
    CHECK(negatives == 1);
  }
}

TEST_CASE("conformal field scalars") {
  {
    const auto [field, data] = cfg_a()->conformal_field_at({0.3, BasePoint::of(1.0)});
    CHECK(field[0] == doctest::Approx(1.0));
    CHECK(field[1] == 0.0);
    CHECK(data.alpha == doctest::Approx(1.0));
    CHECK(data.script_H == 0.0);
  }
  {
    const auto st = make_spacetime(BaseManifold::circle(),
                                   WarpFunction::exponential(1.0, {0.0, 2.0}),
                                   StaticPotential::constant(2.0), true);
    const auto [field, data] = st->conformal_field_at({0.7, BasePoint::of(0.2)});
    CHECK(data.script_H == doctest::Approx(0.5));
  }
  {
    const auto [field, data] = cfg_c()->conformal_field_at({0.9, BasePoint::of(EIGEN_PI)});
    CHECK(data.script_H == doctest::Approx(1.0));
    CHECK(data.alpha == doctest::Approx(std::exp(0.9)));
    CHECK(data.script_H == doctest::Approx(data.eta / data.alpha));
  }
}

TEST_CASE("flow transport confirms the conformal equation") {
  // Killing case: residual at roundoff level.
  CHECK(cfg_a()->lie_derivative_residual({0.4, BasePoint::of(2.2)}) <= 1e-10);

  // Expanding and polynomial warps stay within the probe tolerance, and the
  // residual shrinks at least quadratically with the flow step.
  const auto poly = make_spacetime(BaseManifold::circle(),
                                   WarpFunction::polynomial({1.0, 0.0, 1.0}, {-2.0, 2.0}),
                                   StaticPotential::cosine_offset(BaseManifold::circle(), 2.0, 1.0));
  for (const auto& st : {cfg_c(), poly}) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pick(0.1, 0.9);
    for (int k = 0; k < 10; ++k) {
      AmbientPoint p;
      p.t = st->interval().lo + st->interval().span() * pick(rng);
      p.x.coords[0] = 6.0 * pick(rng);
      CHECK(st->lie_derivative_residual(p) <= 1e-6);
    }
    LieProbeSettings wide, narrow;
    wide.flow_step = 3e-2;
    narrow.flow_step = 1.5e-2;
    // Probe away from the interval midpoint so the warp slope is nonzero and
    // the truncation term dominates the residual.
    const AmbientPoint p{st->interval().lo + 0.7 * st->interval().span(), BasePoint::of(0.8)};
    const double r_wide = st->lie_derivative_residual(p, wide);
    const double r_narrow = st->lie_derivative_residual(p, narrow);
    CHECK(r_narrow <= 0.25 * r_wide);
  }
}

TEST_CASE("slice geometry is umbilic with the closed-form curvature") {
  const auto grid_a = BaseGrid::make(cfg_a()->base_ptr(), 32);
  const SliceGeometry flat = cfg_a()->slice_geometry(0.0, grid_a);
  CHECK(flat.mean_curvature.values.abs().maxCoeff() <= 1e-15);
  CHECK(flat.umbilicity_defect <= 1e-14);

  const auto grw = make_spacetime(BaseManifold::circle(),
                                  WarpFunction::exponential(1.0, {0.0, 2.0}),
                                  StaticPotential::constant(1.0), true);
  const SliceGeometry grw_slice = grw->slice_geometry(1.3, BaseGrid::make(grw->base_ptr(), 32));
  CHECK((grw_slice.mean_curvature.values - 1.0).abs().maxCoeff() <= 1e-12);

  const auto st = cfg_c();
  const auto grid = BaseGrid::make(st->base_ptr(), 64);
  const SliceGeometry slice = st->slice_geometry(0.5, grid);
  CHECK(slice.umbilicity_defect <= 1e-8);
  for (int node = 0; node < grid->node_count(); ++node) {
    const double phi = grid->point(node).coords[0];
    CHECK(std::abs(slice.mean_curvature.values[node] - 1.0 / (2.0 + std::cos(phi))) <= 1e-8);
  }
}

TEST_CASE("domain and monotonicity violations are rejected") {
  CHECK_THROWS_AS((void)cfg_c()->ambient_metric_at({5.0, BasePoint::of(0.0)}), std::domain_error);
  CHECK_THROWS_AS((void)cfg_c()->slice_geometry(-1.0, BaseGrid::make(cfg_c()->base_ptr(), 16)),
                  std::domain_error);
  CHECK_THROWS_AS(make_spacetime(BaseManifold::circle(),
                                 WarpFunction::hyperbolic_cosine(1.0, {-1.0, 1.0}),
                                 StaticPotential::constant(1.0), true),
                  ConfigError);
}
