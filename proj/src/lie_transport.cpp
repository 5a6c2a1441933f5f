#include "dwarp/lie_transport.hpp"

namespace dwarp {

Vector flow_map(const std::function<Vector(const Vector&)>& field, Vector q, double s,
                int substeps) {
  const double h = s / substeps;
  for (int step = 0; step < substeps; ++step) {
    const Vector k1 = field(q);
    const Vector k2 = field(q + 0.5 * h * k1);
    const Vector k3 = field(q + 0.5 * h * k2);
    const Vector k4 = field(q + h * k3);
    q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return q;
}

double lie_transport_residual(const std::function<Vector(const Vector&)>& field,
                              const std::function<Matrix(const Vector&)>& metric_at,
                              const Matrix& target, const Vector& q0,
                              const LieProbeSettings& settings) {
  const int dim = static_cast<int>(q0.size());
  const double eps = settings.flow_step;
  const double delta = settings.jacobian_step;

  // Fourth-order differences keep the truncation error negligible even for
  // stiff warps without pushing the steps into roundoff territory.
  auto pullback = [&](double s) {
    const Vector qs = flow_map(field, q0, s, settings.rk4_substeps);
    Matrix jac(dim, dim);
    for (int k = 0; k < dim; ++k) {
      auto shifted = [&](double step) {
        Vector q = q0;
        q[k] += step;
        return flow_map(field, q, s, settings.rk4_substeps);
      };
      jac.col(k) = (-shifted(2.0 * delta) + 8.0 * shifted(delta) - 8.0 * shifted(-delta) +
                    shifted(-2.0 * delta)) /
                   (12.0 * delta);
    }
    return Matrix(jac.transpose() * metric_at(qs) * jac);
  };

  const Matrix lie = (-pullback(2.0 * eps) + 8.0 * pullback(eps) - 8.0 * pullback(-eps) +
                      pullback(-2.0 * eps)) /
                     (12.0 * eps);
  return (lie - target).cwiseAbs().maxCoeff();
}

} // namespace dwarp
