#include "dwarp/spacetime.hpp"

#include <cmath>
#include <sstream>

namespace dwarp {

DoublyWarpedSpacetime::DoublyWarpedSpacetime(std::shared_ptr<const BaseManifold> base,
                                             WarpFunction warp, StaticPotential potential,
                                             bool monotone)
    : base_(std::move(base)), warp_(std::move(warp)), potential_(std::move(potential)),
      monotone_(monotone) {
  potential_.validate_for(*base_);
  if (monotone_ && !warp_.nondecreasing_on_domain()) {
    throw ConfigError("monotone flag set but the warp decreases somewhere on its domain");
  }
}

void DoublyWarpedSpacetime::check_point(const AmbientPoint& p) const {
  if (!interval().contains(p.t)) {
    throw std::domain_error("ambient point outside the time interval");
  }
}

Matrix DoublyWarpedSpacetime::ambient_metric_at(const AmbientPoint& p) const {
  check_point(p);
  const int m = base_->dim();
  const double h = potential_.value(p.x);
  const double rho = warp_.value(p.t);
  Matrix g = Matrix::Zero(m + 1, m + 1);
  g(0, 0) = -h * h;
  g.block(1, 1, m, m) = rho * rho * base_->metric_at(p.x);
  return g;
}

Matrix DoublyWarpedSpacetime::ambient_metric_inverse_at(const AmbientPoint& p) const {
  check_point(p);
  const int m = base_->dim();
  const double h = potential_.value(p.x);
  const double rho = warp_.value(p.t);
  Matrix g = Matrix::Zero(m + 1, m + 1);
  g(0, 0) = -1.0 / (h * h);
  g.block(1, 1, m, m) = base_->metric_inverse_at(p.x) / (rho * rho);
  return g;
}

std::vector<Matrix> DoublyWarpedSpacetime::christoffels_at(const AmbientPoint& p) const {
  check_point(p);
  const int m = base_->dim();
  const double h = potential_.value(p.x);
  const double rho = warp_.value(p.t);
  const double drho = warp_.deriv(p.t);
  const Vector dh = potential_.gradient(p.x);
  const Matrix sigma = base_->metric_at(p.x);
  const Matrix sigma_inv = base_->metric_inverse_at(p.x);
  const auto sigma_gamma = base_->christoffels_at(p.x);

  std::vector<Matrix> gamma(m + 1, Matrix::Zero(m + 1, m + 1));

  // gamma^0: time row/column carry d h / h, the spatial block carries the
  // warp expansion rho rho' sigma / h^2.
  for (int i = 0; i < m; ++i) {
    gamma[0](0, i + 1) = gamma[0](i + 1, 0) = dh[i] / h;
    for (int j = 0; j < m; ++j) {
      gamma[0](i + 1, j + 1) = rho * drho * sigma(i, j) / (h * h);
    }
  }

  // gamma^i: potential acceleration, warp drag, and the base symbols.
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += sigma_inv(i, j) * dh[j];
    gamma[i + 1](0, 0) = h * acc / (rho * rho);
    gamma[i + 1](0, i + 1) = gamma[i + 1](i + 1, 0) = drho / rho;
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        gamma[i + 1](j + 1, k + 1) = sigma_gamma[i](j, k);
      }
    }
  }
  return gamma;
}

std::pair<Vector, ConformalData> DoublyWarpedSpacetime::conformal_field_at(
    const AmbientPoint& p) const {
  check_point(p);
  const int m = base_->dim();
  const double h = potential_.value(p.x);
  const double rho = warp_.value(p.t);
  Vector field = Vector::Zero(m + 1);
  field[0] = rho;
  ConformalData data;
  data.alpha = h * rho;
  data.eta = warp_.deriv(p.t);
  data.script_H = data.eta / data.alpha;
  return {field, data};
}

double DoublyWarpedSpacetime::script_H(double t, const BasePoint& x) const {
  return warp_.deriv(t) / (warp_.value(t) * potential_.value(x));
}

double DoublyWarpedSpacetime::lie_derivative_residual(const AmbientPoint& p,
                                                      LieProbeSettings settings) const {
  check_point(p);
  const int m = base_->dim();
  const int chart = p.x.chart;

  auto unpack = [m, chart](const Vector& q) {
    AmbientPoint a;
    a.t = q[0];
    for (int i = 0; i < m; ++i) a.x.coords[i] = q[i + 1];
    a.x.chart = chart;
    return a;
  };

  auto field = [&](const Vector& q) {
    Vector v = Vector::Zero(m + 1);
    v[0] = warp_.value(q[0]);
    return v;
  };
  auto metric = [&](const Vector& q) { return ambient_metric_at(unpack(q)); };

  Vector q0(m + 1);
  q0[0] = p.t;
  for (int i = 0; i < m; ++i) q0[i + 1] = p.x.coords[i];

  // Temper the flow step where the warp is large or changes fast: the
  // square-root scaling balances fourth-order truncation against roundoff
  // and keeps the t-excursion below ~2 (flow_step + jacobian_step). Sample
  // probe points at least 1e-2 inside the interval.
  const double slack = 1.0 + std::max(std::abs(warp_.value(p.t)), std::abs(warp_.deriv(p.t)));
  settings.flow_step /= std::sqrt(slack);

  const Matrix target = 2.0 * warp_.deriv(p.t) * ambient_metric_at(p);
  return lie_transport_residual(field, metric, target, q0, settings);
}

SliceGeometry DoublyWarpedSpacetime::slice_geometry(double t0, const GridPtr& grid) const {
  if (!interval().contains(t0)) throw std::domain_error("slice time outside the interval");
  SliceGeometry out;
  out.mean_curvature = ScalarField(grid);
  double defect = 0.0;
  const double rho = warp_.value(t0);
  const double drho = warp_.deriv(t0);
  const int m = base_->dim();
  for (int node = 0; node < grid->node_count(); ++node) {
    const BasePoint x = grid->point(node);
    const double h = potential_.value(x);
    const double sH = drho / (rho * h);
    out.mean_curvature.values[node] = sH;

    // Second fundamental form coefficient of the slice from the ambient
    // symbols: the normal component of nabla_{d_i} d_j against N = d_t / h
    // is h * gamma^0_{ij}; umbilicity compares it with script_H * g_ij.
    const AmbientPoint p{t0, x};
    const auto gamma = christoffels_at(p);
    const Matrix g_ind = rho * rho * base_->metric_at(x);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double ii_coef = h * gamma[0](i + 1, j + 1);
        defect = std::max(defect, std::abs(ii_coef - sH * g_ind(i, j)));
      }
    }
  }
  out.umbilicity_defect = defect;
  return out;
}

std::string DoublyWarpedSpacetime::describe() const {
  std::ostringstream out;
  out << "base=" << base_->describe() << " warp=" << warp_.describe()
      << " potential=" << potential_.describe();
  return out.str();
}

} // namespace dwarp
