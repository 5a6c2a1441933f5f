#pragma once

#include "dwarp/lie_transport.hpp"

#include <nlohmann/json_fwd.hpp>

namespace dwarp {

/// The flat Lorentzian cylinder {x^2 + y^2 = 1} in Minkowski 3-space with
/// metric -dt^2 + dx^2 + dy^2, in surface coordinates (theta, t). It carries
/// the Killing fields X_a = d_t - a y d_x + a x d_y (timelike for |a| < 1);
/// the horizontal circles are compact spacelike geodesics but are orthogonal
/// to X_a only for a = 0, while the integral surfaces orthogonal to X_a for
/// a != 0 are the noncompact helices s -> (cos s, sin s, a s + t0).
namespace cylinder {

struct CylinderPoint {
  double theta = 0.0; // reduced mod 2 pi
  double t = 0.0;
};

CylinderPoint reduce(CylinderPoint p);

/// Embedding (x, y, t) and the Minkowski product with signature (+, +, -).
Eigen::Vector3d embed(const CylinderPoint& p);
double minkowski_dot(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Killing field in surface coordinates: (a, 1).
Vector killing_field(double a, const CylinderPoint& p);

/// Max flow-transport Lie-derivative residual of the induced metric under
/// X_a over sampled points. Rejects |a| >= 1 (the field must stay timelike).
double killing_residual(double a, int sample_count = 32, std::uint64_t seed = 3,
                        const LieProbeSettings& settings = {});

/// Max over theta samples of g(circle tangent, X_a); analytically equals a.
double circle_orthogonality_defect(double a, double t0, int samples = 128);

struct HelixCheckResult {
  double geodesic_residual = 0.0;      // tangential part of gamma''
  double orthogonality_residual = 0.0; // g(gamma', X_a)
  double causal_character = 0.0;       // g(gamma', gamma') = 1 - a^2
};

/// Samples the helix s -> (cos s, sin s, a s + t0); derivatives come from
/// high-order finite differences of the embedded curve, not from
/// hand-differentiated formulas.
HelixCheckResult helix_checks(double a, double t0, int samples = 64);

/// Report for a batch of Killing parameters.
nlohmann::ordered_json report(const std::vector<double>& a_values, std::uint64_t seed = 3);

} // namespace cylinder
} // namespace dwarp
