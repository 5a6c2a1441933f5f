#include "dwarp/hypersurface.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

namespace dwarp {

namespace {

// Pointwise chart derivative used by the normal-derivative curvature route.
// Kept separate from the field operators so the two curvature paths do not
// share differentiation code.
double node_deriv(const BaseGrid& grid, const Array& vals, int node, int axis,
                  StencilOrder order) {
  int b, i0, i1;
  grid.local_coords(node, b, i0, i1);
  const GridBlock& blk = grid.block(b);
  const int n = blk.dims[axis];
  const int i = axis == 0 ? i0 : i1;
  const double inv_h = 1.0 / blk.spacing[axis];
  auto at = [&](int off) {
    int k = i + off;
    if (blk.edge[axis] == EdgeRule::Periodic) {
      k = ((k % n) + n) % n;
    }
    return vals[axis == 0 ? grid.node_index(b, k, i1) : grid.node_index(b, i0, k)];
  };
  const bool interior2 = blk.edge[axis] == EdgeRule::Periodic || (i > 0 && i < n - 1);
  if (order == StencilOrder::Second) {
    if (interior2) return 0.5 * inv_h * (at(1) - at(-1));
    if (i == 0) return inv_h * (-1.5 * at(0) + 2.0 * at(1) - 0.5 * at(2));
    return inv_h * (1.5 * at(0) - 2.0 * at(-1) + 0.5 * at(-2));
  }
  const bool interior4 = blk.edge[axis] == EdgeRule::Periodic || (i > 1 && i < n - 2);
  if (interior4) {
    return inv_h * (at(-2) / 12.0 - 2.0 * at(-1) / 3.0 + 2.0 * at(1) / 3.0 - at(2) / 12.0);
  }
  if (i == 0) {
    return inv_h *
           (-25.0 / 12.0 * at(0) + 4.0 * at(1) - 3.0 * at(2) + 4.0 / 3.0 * at(3) - 0.25 * at(4));
  }
  if (i == 1) {
    return inv_h *
           (-0.25 * at(-1) - 5.0 / 6.0 * at(0) + 1.5 * at(1) - 0.5 * at(2) + at(3) / 12.0);
  }
  if (i == n - 1) {
    return inv_h *
           (25.0 / 12.0 * at(0) - 4.0 * at(-1) + 3.0 * at(-2) - 4.0 / 3.0 * at(-3) + 0.25 * at(-4));
  }
  return inv_h * (0.25 * at(1) + 5.0 / 6.0 * at(0) - 1.5 * at(-1) + 0.5 * at(-2) - at(-3) / 12.0);
}

} // namespace

GraphHypersurface::GraphHypersurface(SpacetimePtr spacetime, ScalarField height,
                                     StencilOrder order)
    : spacetime_(std::move(spacetime)), height_(std::move(height)), order_(order) {
  const BaseGrid& grid = height_.grid();
  const BaseManifold& base = grid.model();
  if (base.kind() != spacetime_->base().kind()) {
    throw ConfigError("height grid does not live on the spacetime base");
  }
  const int m = base.dim();
  const int n = grid.node_count();
  const Interval& I = spacetime_->interval();
  for (int node = 0; node < n; ++node) {
    if (!I.contains(height_.values[node])) {
      throw std::domain_error("graph height leaves the time interval at node " +
                              std::to_string(node));
    }
  }

  dheight_ = VectorField(height_.grid_ptr());
  for (int a = 0; a < m; ++a) {
    dheight_.comp[a] = axis_derivative(grid, height_.values, a, order_);
  }

  metric_ = SymTensorField(height_.grid_ptr());
  margin_ = ScalarField(height_.grid_ptr());
  lambda_ = ScalarField(height_.grid_ptr());
  cosh_theta_ = ScalarField(height_.grid_ptr());
  h_ = Array::Zero(n);
  rho_ = Array::Zero(n);
  drho_ = Array::Zero(n);
  for (auto& c : normal_) c = Array::Zero(n);

  int worst_node = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int node = 0; node < n; ++node) {
    const BasePoint x = grid.point(node);
    const double u = height_.values[node];
    const double h = spacetime_->potential().value(x);
    const double rho = spacetime_->warp().value(u);
    h_[node] = h;
    rho_[node] = rho;
    drho_[node] = spacetime_->warp().deriv(u);

    const Matrix sigma = base.metric_at(x);
    const Vector du = dheight_.at(node);
    Matrix g = rho * rho * sigma - h * h * du * du.transpose();
    metric_.set(node, g);
    const double margin = metric_.eigen_min(node, m);
    margin_.values[node] = margin;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst_node = node;
    }
  }
  if (!(worst_margin > 0.0)) {
    throw SpacelikeViolation("graph is not spacelike: induced metric degenerates at node " +
                                 std::to_string(worst_node) + " (margin " +
                                 std::to_string(worst_margin) + ")",
                             worst_node, worst_margin);
  }

  for (int node = 0; node < n; ++node) {
    const BasePoint x = grid.point(node);
    const Matrix sigma_inv = base.metric_inverse_at(x);
    const Vector du = dheight_.at(node);
    const double h = h_[node];
    const double rho = rho_[node];
    const double grad_sq = du.dot(sigma_inv * du);
    const double lambda = std::sqrt(1.0 - h * h * grad_sq / (rho * rho));
    lambda_.values[node] = lambda;
    cosh_theta_.values[node] = 1.0 / lambda;

    normal_[0][node] = 1.0 / (h * lambda);
    const Vector raised = sigma_inv * du;
    for (int i = 0; i < m; ++i) {
      normal_[i + 1][node] = h * raised[i] / (rho * rho * lambda);
    }
  }
}

ScalarField GraphHypersurface::script_H_field() const {
  ScalarField out(height_.grid_ptr());
  out.values = drho_ / (rho_ * h_);
  return out;
}

PointGeometry GraphHypersurface::geometry_at(int node) const {
  const BaseGrid& grid = height_.grid();
  const int m = grid.model().dim();
  PointGeometry out;
  out.induced_metric = metric_.at(node);
  out.induced_metric_inv = m == 1
                               ? Matrix::Constant(1, 1, 1.0 / out.induced_metric(0, 0))
                               : Matrix(out.induced_metric.inverse());
  out.normal = Vector(m + 1);
  for (int mu = 0; mu <= m; ++mu) out.normal[mu] = normal_[mu][node];
  out.cosh_theta = cosh_theta_.values[node];

  const AmbientPoint p{height_.values[node], grid.point(node)};
  const auto gamma = spacetime_->christoffels_at(p);
  const Matrix gbar = spacetime_->ambient_metric_at(p);
  const Vector du = dheight_.at(node);

  // Covariant derivative of the normal along each graph tangent
  // E_j = du_j d_t + d_j, projected back onto the tangent space. The chart
  // components of a tangent vector are exactly its coefficients in the E
  // basis.
  out.shape = Matrix(m, m);
  for (int j = 0; j < m; ++j) {
    Vector w(m + 1);
    for (int mu = 0; mu <= m; ++mu) {
      double val = node_deriv(grid, normal_[mu], node, j, order_);
      for (int nu = 0; nu <= m; ++nu) {
        val += (du[j] * gamma[mu](0, nu) + gamma[mu](j + 1, nu)) * normal_[nu][node];
      }
      w[mu] = val;
    }
    const double normal_part = w.dot(gbar * out.normal);
    const Vector w_tan = w + normal_part * out.normal;
    for (int i = 0; i < m; ++i) out.shape(i, j) = w_tan[i + 1];
  }
  out.mean_curvature = out.shape.trace() / m;

  out.x_tangent = Vector(m);
  const Vector raised = out.induced_metric_inv * du;
  for (int i = 0; i < m; ++i) {
    out.x_tangent[i] = -rho_[node] * h_[node] * h_[node] * raised[i];
  }
  return out;
}

ScalarField GraphHypersurface::mean_curvature_field() const {
  ScalarField out(height_.grid_ptr());
  const int n = grid().node_count();
  std::vector<double> slots(n);
  parallel_for(n, [&](int node) { slots[node] = geometry_at(node).mean_curvature; });
  for (int node = 0; node < n; ++node) out.values[node] = slots[node];
  return out;
}

ScalarField GraphHypersurface::mean_curvature_via_divergence() const {
  const int m = grid().model().dim();
  ScalarField weight(height_.grid_ptr());
  weight.values = rho_ * h_ * h_;
  VectorField flux = grad_metric(height_, metric_, order_);
  for (int a = 0; a < m; ++a) flux.comp[a] *= weight.values;
  ScalarField div = div_metric(flux, metric_, order_);

  ScalarField out(height_.grid_ptr());
  out.values =
      (div.values / (m * h_ * rho_) + drho_ / (rho_ * h_)) * lambda_.values;
  return out;
}

std::pair<ScalarField, ScalarField> GraphHypersurface::weighted_laplacian_forms() const {
  ScalarField w1(height_.grid_ptr());
  w1.values = rho_ * h_ * h_;
  ScalarField first = weighted_laplacian(height_, w1, metric_, order_);

  ScalarField ru(height_.grid_ptr());
  for (int node = 0; node < grid().node_count(); ++node) {
    ru.values[node] = spacetime_->warp().antideriv(height_.values[node]);
  }
  ScalarField w2(height_.grid_ptr());
  w2.values = h_ * h_;
  ScalarField second = weighted_laplacian(ru, w2, metric_, order_);
  return {std::move(first), std::move(second)};
}

double GraphHypersurface::projection_metric_comparison() const {
  const BaseGrid& g = grid();
  const int m = g.model().dim();
  double worst = std::numeric_limits<double>::infinity();
  for (int node = 0; node < g.node_count(); ++node) {
    const Matrix sigma = g.model().metric_at(g.point(node));
    const Matrix gap = rho_[node] * rho_[node] * sigma - metric_.at(node);
    double eig_min;
    if (m == 1) {
      eig_min = gap(0, 0);
    } else {
      const double tr2 = 0.5 * (gap(0, 0) + gap(1, 1));
      const double d = 0.5 * (gap(0, 0) - gap(1, 1));
      eig_min = tr2 - std::sqrt(d * d + gap(0, 1) * gap(0, 1));
    }
    worst = std::min(worst, eig_min);
  }
  return worst;
}

void GraphHypersurface::write_csv(std::ostream& out, const std::string& comment) const {
  const BaseGrid& g = grid();
  const int m = g.model().dim();
  const ScalarField h_normal = mean_curvature_field();
  const ScalarField h_div = mean_curvature_via_divergence();
  if (!comment.empty()) out << "# " << comment << "\n";
  out << (m == 1 ? "c0" : "c0,c1") << ",u,H,H_alt,cosh_theta,margin,residual\n";
  out << std::setprecision(17);
  for (int node = 0; node < g.node_count(); ++node) {
    const BasePoint p = g.point(node);
    out << p.coords[0];
    if (m == 2) out << "," << p.coords[1];
    out << "," << height_.values[node] << "," << h_normal.values[node] << ","
        << h_div.values[node] << "," << cosh_theta_.values[node] << "," << margin_.values[node]
        << "," << std::abs(h_normal.values[node] - h_div.values[node]) << "\n";
  }
}

GraphSampler::GraphSampler(const BaseManifold& model, std::uint64_t seed, int max_mode) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * EIGEN_PI);
  const int K = std::max(1, max_mode);
  double total = 0.0;
  switch (model.kind()) {
    case BaseKind::Circle: {
      for (int k = 1; k <= K; ++k) {
        Mode mode{k, 0, unit(rng) / (k * k), angle(rng)};
        total += std::abs(mode.amplitude);
        modes_.push_back(mode);
      }
      break;
    }
    case BaseKind::FlatTorus2: {
      freq_ = {2.0 * EIGEN_PI / model.period(0), 2.0 * EIGEN_PI / model.period(1)};
      for (int k = 0; k <= K; ++k) {
        for (int l = 0; l <= K; ++l) {
          if (k + l == 0) continue;
          Mode mode{k, l, unit(rng) / (k * k + l * l), angle(rng)};
          total += std::abs(mode.amplitude);
          modes_.push_back(mode);
        }
      }
      break;
    }
    case BaseKind::RoundSphere2: {
      // Polynomials in the embedding coordinates are chart-independent.
      radius_ = model.radius();
      for (int d0 = 0; d0 <= 2; ++d0) {
        for (int d1 = 0; d1 + d0 <= 2; ++d1) {
          for (int d2 = 0; d2 + d1 + d0 <= 2; ++d2) {
            const int deg = d0 + d1 + d2;
            if (deg == 0) continue;
            Mode mode{d0 * 9 + d1 * 3 + d2, -1, unit(rng) / (deg * deg), 0.0};
            total += std::abs(mode.amplitude);
            modes_.push_back(mode);
          }
        }
      }
      break;
    }
    case BaseKind::EuclideanPlane:
      throw ConfigError("random graphs are defined on compact bases");
  }
  for (auto& mode : modes_) mode.amplitude /= total;
}

double GraphSampler::eval(const BasePoint& p) const {
  double acc = 0.0;
  if (!modes_.empty() && modes_.front().k1 == -1) {
    // Sphere: decode embedding monomials (scaled to the unit sphere so the
    // amplitudes stay O(1)). Chart 0 projects from the north pole, chart 1
    // from the south pole with the second axis flipped.
    const double R = radius_;
    const double r2 = p.coords.squaredNorm();
    const double s = r2 + R * R;
    double X = 2.0 * R * p.coords[0] / s;
    double Y = 2.0 * R * p.coords[1] / s;
    double Z = (r2 - R * R) / s;
    if (p.chart == 1) {
      Y = -Y;
      Z = -Z;
    }
    for (const auto& mode : modes_) {
      const int d0 = mode.k0 / 9, d1 = (mode.k0 / 3) % 3, d2 = mode.k0 % 3;
      acc += mode.amplitude * std::pow(X, d0) * std::pow(Y, d1) * std::pow(Z, d2);
    }
    return acc;
  }
  for (const auto& mode : modes_) {
    acc += mode.amplitude *
           std::cos(mode.k0 * freq_[0] * p.coords[0] + mode.k1 * freq_[1] * p.coords[1] +
                    mode.phase);
  }
  return acc;
}

ScalarField slice_height(GridPtr grid, double t0) {
  ScalarField u(std::move(grid));
  u.values.setConstant(t0);
  return u;
}

ScalarField sample_graph_height(GridPtr grid, const GraphSampler& sampler, double center,
                                double amplitude) {
  ScalarField u(grid);
  for (int node = 0; node < grid->node_count(); ++node) {
    u.values[node] = center + amplitude * sampler.eval(grid->point(node));
  }
  return u;
}

double fit_amplitude(const SpacetimePtr& spacetime, const GridPtr& grid,
                     const GraphSampler& sampler, double initial, double margin_floor) {
  const Interval& I = spacetime->interval();
  const double buffer = 0.02 * I.span();
  double amp = std::min(initial, 0.45 * I.span());
  for (int iter = 0; iter < 60; ++iter) {
    const double center = I.mid();
    if (amp < buffer || (center - amp > I.lo + buffer && center + amp < I.hi - buffer)) {
      try {
        GraphHypersurface trial(spacetime, sample_graph_height(grid, sampler, center, amp));
        if (trial.margin().values.minCoeff() >= margin_floor) return amp;
      } catch (const SpacelikeViolation&) {
      }
    }
    amp *= 0.5;
  }
  throw std::runtime_error("could not fit a spacelike amplitude for the random graph");
}

GraphHypersurface random_spacelike_graph(const SpacetimePtr& spacetime, const GridPtr& grid,
                                         std::uint64_t seed, double amplitude,
                                         double margin_floor) {
  int min_nodes = grid->block(0).dims[0];
  for (int a = 0; a < grid->model().dim(); ++a) {
    min_nodes = std::min(min_nodes, grid->block(0).dims[a]);
  }
  const int max_mode = std::max(1, std::min(10, min_nodes / 4));
  GraphSampler sampler(grid->model(), seed, max_mode);
  const double amp = fit_amplitude(spacetime, grid, sampler, amplitude, margin_floor);
  return GraphHypersurface(spacetime,
                           sample_graph_height(grid, sampler, spacetime->interval().mid(), amp));
}

double height_derivative_scale(const GraphHypersurface& surface, int max_order) {
  const BaseGrid& grid = surface.grid();
  double worst = 1.0;
  for (int axis = 0; axis < grid.model().dim(); ++axis) {
    Array d = surface.height().values;
    for (int order = 1; order <= max_order; ++order) {
      d = axis_derivative(grid, d, axis, surface.stencil_order());
      if (order >= 3) worst = std::max(worst, d.abs().maxCoeff());
    }
  }
  return worst;
}

ScalarField bump_graph_height(GridPtr grid, double t0, double height, double radius,
                              const BasePoint& center) {
  if (grid->model().kind() != BaseKind::EuclideanPlane) {
    throw ConfigError("bump graphs are defined on the plane base");
  }
  if (radius <= 0.0) throw std::invalid_argument("bump radius must be positive");
  ScalarField u(grid);
  for (int node = 0; node < grid->node_count(); ++node) {
    const BasePoint p = grid->point(node);
    const double r = (p.coords - center.coords).norm();
    double val = t0;
    if (r < radius) {
      const double s = r / radius;
      val += height * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    u.values[node] = val;
  }
  return u;
}

} // namespace dwarp
