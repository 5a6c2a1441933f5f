#include "dwarp/cylinder.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

namespace dwarp {
namespace cylinder {

namespace {

constexpr double kTwoPi = 2.0 * EIGEN_PI;

void require_timelike(double a) {
  if (!(std::abs(a) < 1.0)) {
    throw std::invalid_argument("the Killing field is timelike only for |a| < 1");
  }
}

// Induced metric of the cylinder in (theta, t) coordinates.
Matrix induced_metric() {
  Matrix g(2, 2);
  g << 1.0, 0.0, 0.0, -1.0;
  return g;
}

// 7-point sixth-order first and second derivative stencils; the step keeps
// both truncation and roundoff below 1e-11 for trigonometric data.
constexpr double kHelixStep = 1e-2;

Eigen::Vector3d sampled_derivative(const std::function<Eigen::Vector3d(double)>& curve, double s,
                                   int order) {
  const double h = kHelixStep;
  std::array<Eigen::Vector3d, 7> f;
  for (int k = -3; k <= 3; ++k) f[k + 3] = curve(s + k * h);
  if (order == 1) {
    return (-f[0] + 9.0 * f[1] - 45.0 * f[2] + 45.0 * f[4] - 9.0 * f[5] + f[6]) / (60.0 * h);
  }
  return (2.0 * f[0] - 27.0 * f[1] + 270.0 * f[2] - 490.0 * f[3] + 270.0 * f[4] - 27.0 * f[5] +
          2.0 * f[6]) /
         (180.0 * h * h);
}

} // namespace

CylinderPoint reduce(CylinderPoint p) {
  p.theta = std::fmod(p.theta, kTwoPi);
  if (p.theta < 0.0) p.theta += kTwoPi;
  return p;
}

Eigen::Vector3d embed(const CylinderPoint& p) {
  return {std::cos(p.theta), std::sin(p.theta), p.t};
}

double minkowski_dot(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
}

Vector killing_field(double a, const CylinderPoint&) {
  Vector v(2);
  v << a, 1.0;
  return v;
}

double killing_residual(double a, int sample_count, std::uint64_t seed,
                        const LieProbeSettings& settings) {
  require_timelike(a);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta_pick(0.0, kTwoPi);
  std::uniform_real_distribution<double> t_pick(-2.0, 2.0);

  auto field = [a](const Vector& q) { return killing_field(a, {q[0], q[1]}); };
  auto metric = [](const Vector&) { return induced_metric(); };
  const Matrix target = Matrix::Zero(2, 2);

  double worst = 0.0;
  for (int k = 0; k < sample_count; ++k) {
    Vector q(2);
    q << theta_pick(rng), t_pick(rng);
    worst = std::max(worst, lie_transport_residual(field, metric, target, q, settings));
  }
  return worst;
}

double circle_orthogonality_defect(double a, double t0, int samples) {
  require_timelike(a);
  double worst = 0.0;
  bool first = true;
  for (int k = 0; k < samples; ++k) {
    const double theta = kTwoPi * k / samples;
    const Eigen::Vector3d p = embed({theta, t0});
    const Eigen::Vector3d tangent{-std::sin(theta), std::cos(theta), 0.0};
    const Eigen::Vector3d killing{-a * p[1], a * p[0], 1.0};
    const double dot = minkowski_dot(tangent, killing);
    if (first || std::abs(dot) > std::abs(worst)) worst = dot;
    first = false;
  }
  return worst;
}

HelixCheckResult helix_checks(double a, double t0, int samples) {
  require_timelike(a);
  auto curve = [a, t0](double s) {
    return Eigen::Vector3d{std::cos(s), std::sin(s), a * s + t0};
  };

  HelixCheckResult out;
  bool first = true;
  for (int k = 0; k < samples; ++k) {
    const double s = kTwoPi * k / samples;
    const Eigen::Vector3d p = curve(s);
    const Eigen::Vector3d vel = sampled_derivative(curve, s, 1);
    const Eigen::Vector3d acc = sampled_derivative(curve, s, 2);

    // Tangential part of the acceleration: remove the component along the
    // outward cylinder normal (x, y, 0), a spacelike unit vector.
    const Eigen::Vector3d normal{p[0], p[1], 0.0};
    const Eigen::Vector3d tangential = acc - minkowski_dot(acc, normal) * normal;
    out.geodesic_residual = std::max(out.geodesic_residual, tangential.cwiseAbs().maxCoeff());

    const Eigen::Vector3d killing{-a * p[1], a * p[0], 1.0};
    out.orthogonality_residual =
        std::max(out.orthogonality_residual, std::abs(minkowski_dot(vel, killing)));

    if (first) out.causal_character = minkowski_dot(vel, vel);
    first = false;
  }
  return out;
}

nlohmann::ordered_json report(const std::vector<double>& a_values, std::uint64_t seed) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (double a : a_values) {
    const HelixCheckResult helix = helix_checks(a, 0.25);
    nlohmann::ordered_json row;
    row["a"] = a;
    row["killing_residual"] = killing_residual(a, 32, seed);
    row["circle_orthogonality_defect"] = circle_orthogonality_defect(a, 0.25);
    row["helix_geodesic_residual"] = helix.geodesic_residual;
    row["helix_orthogonality_residual"] = helix.orthogonality_residual;
    row["helix_causal_character"] = helix.causal_character;
    row["timelike_norm"] = a * a - 1.0;
    rows.push_back(row);
  }
  nlohmann::ordered_json j;
  j["surface"] = "flat_lorentzian_cylinder";
  j["entries"] = rows;
  return j;
}

} // namespace cylinder
} // namespace dwarp
