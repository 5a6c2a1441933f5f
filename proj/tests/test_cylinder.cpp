#include "dwarp/cylinder.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>

using namespace dwarp;

TEST_CASE("cylinder points reduce modulo the full angle") {
  const auto p = cylinder::reduce({2.0 * EIGEN_PI + 0.5, 1.0});
  CHECK(p.theta == doctest::Approx(0.5));
  CHECK(p.t == 1.0);
  CHECK(cylinder::reduce({-0.5, 0.0}).theta == doctest::Approx(2.0 * EIGEN_PI - 0.5));
}

TEST_CASE("flow transport confirms the Killing property") {
  CHECK(cylinder::killing_residual(0.0) <= 1e-10);
  CHECK(cylinder::killing_residual(0.5) <= 1e-6);
  CHECK(cylinder::killing_residual(0.9) <= 1e-6);
  CHECK(cylinder::killing_residual(-0.5) <= 1e-6);
}

TEST_CASE("the Killing parameter must stay timelike") {
  CHECK_THROWS_AS((void)cylinder::killing_residual(1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cylinder::circle_orthogonality_defect(-1.2, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)cylinder::helix_checks(1.5, 0.0), std::invalid_argument);
}

TEST_CASE("horizontal circles are orthogonal to the field only at a = 0") {
  CHECK(std::abs(cylinder::circle_orthogonality_defect(0.0, 0.7)) <= 1e-15);
  CHECK(cylinder::circle_orthogonality_defect(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(cylinder::circle_orthogonality_defect(-0.3, 2.0) ==
        doctest::Approx(-0.3).epsilon(1e-13));
  // Independence of the circle height.
  for (double t0 : {-3.0, 0.0, 5.5}) {
    CHECK(std::abs(cylinder::circle_orthogonality_defect(0.8, t0) - 0.8) <= 1e-12);
  }
}

TEST_CASE("helices are spacelike geodesics orthogonal to their field") {
  {
    const auto res = cylinder::helix_checks(0.0, 0.3);
    CHECK(res.geodesic_residual <= 1e-10);
    CHECK(res.orthogonality_residual <= 1e-10);
    CHECK(res.causal_character == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    const auto res = cylinder::helix_checks(0.5, 0.0);
    CHECK(res.geodesic_residual <= 1e-10);
    CHECK(res.orthogonality_residual <= 1e-10);
    CHECK(std::abs(res.causal_character - 0.75) <= 1e-12);
  }
  {
    // Near the null boundary the helix stays (barely) spacelike.
    const auto res = cylinder::helix_checks(0.99, 0.0);
    CHECK(std::abs(res.causal_character - 0.0199) <= 1e-12);
    CHECK(res.causal_character > 0.0);
  }
}

TEST_CASE("the field norm is a^2 - 1 at sampled points") {
  for (double a : {-0.9, -0.2, 0.0, 0.4, 0.95}) {
    for (double theta : {0.0, 1.2, 4.5}) {
      const Eigen::Vector3d p = cylinder::embed({theta, 0.8});
      const Eigen::Vector3d killing{-a * p[1], a * p[0], 1.0};
      CHECK(cylinder::minkowski_dot(killing, killing) ==
            doctest::Approx(a * a - 1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("batch report rows carry every residual") {
  const auto j = cylinder::report({0.0, 0.5});
  CHECK(j["entries"].size() == 2);
  for (const auto& row : j["entries"]) {
    for (const char* key :
         {"a", "killing_residual", "circle_orthogonality_defect", "helix_geodesic_residual",
          "helix_orthogonality_residual", "helix_causal_character", "timelike_norm"}) {
      CHECK(row.contains(key));
    }
  }
}
