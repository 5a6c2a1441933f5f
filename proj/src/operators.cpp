#include "dwarp/operators.hpp"

#include <cmath>

namespace dwarp {

namespace {

struct Stencil {
  int first_offset;
  std::vector<double> coefs; // divided by spacing at application time
};

// Second-order family.
const Stencil kCentral2{-1, {-0.5, 0.0, 0.5}};
const Stencil kLeft2{0, {-1.5, 2.0, -0.5}};
const Stencil kRight2{-2, {0.5, -2.0, 1.5}};

// Fourth-order family.
const Stencil kCentral4{-2, {1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0}};
const Stencil kLeft4_0{0, {-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25}};
const Stencil kLeft4_1{-1, {-0.25, -5.0 / 6.0, 1.5, -0.5, 1.0 / 12.0}};
const Stencil kRight4_0{-4, {0.25, -4.0 / 3.0, 3.0, -4.0, 25.0 / 12.0}};
const Stencil kRight4_1{-3, {-1.0 / 12.0, 0.5, -1.5, 5.0 / 6.0, 0.25}};

const Stencil& pick_stencil(StencilOrder order, EdgeRule rule, int i, int n) {
  if (order == StencilOrder::Second) {
    if (rule == EdgeRule::Periodic) return kCentral2;
    if (i == 0) return kLeft2;
    if (i == n - 1) return kRight2;
    return kCentral2;
  }
  if (rule == EdgeRule::Periodic) return kCentral4;
  if (i == 0) return kLeft4_0;
  if (i == 1) return kLeft4_1;
  if (i == n - 1) return kRight4_0;
  if (i == n - 2) return kRight4_1;
  return kCentral4;
}

void check_resolution(const BaseGrid& grid, StencilOrder order) {
  const int need = order == StencilOrder::Second ? 4 : 6;
  for (int b = 0; b < grid.block_count(); ++b) {
    for (int a = 0; a < grid.model().dim(); ++a) {
      if (grid.block(b).dims[a] < need) {
        throw std::invalid_argument("grid too coarse for stencils: need at least " +
                                    std::to_string(need) + " nodes per coordinate");
      }
    }
  }
}

Matrix sym_inverse(const SymTensorField& g, int node, int m) {
  Matrix inv(m, m);
  if (m == 1) {
    inv(0, 0) = 1.0 / g.c00[node];
    return inv;
  }
  const double det = g.det(node, 2);
  inv(0, 0) = g.c11[node] / det;
  inv(1, 1) = g.c00[node] / det;
  inv(0, 1) = inv(1, 0) = -g.c01[node] / det;
  return inv;
}

void require_decay_on_boundary(const ScalarField& f) {
  const BaseGrid& grid = f.grid();
  const GridBlock& blk = grid.block(0);
  double fmax = f.values.abs().maxCoeff();
  double edge_max = 0.0;
  for (int node = 0; node < grid.node_count(); ++node) {
    int b, i0, i1;
    grid.local_coords(node, b, i0, i1);
    if (i0 == 0 || i1 == 0 || i0 == blk.dims[0] - 1 || i1 == blk.dims[1] - 1) {
      edge_max = std::max(edge_max, std::abs(f.values[node]));
    }
  }
  if (edge_max > 1e-8 * (1.0 + fmax)) {
    throw NonCompactBase("integral over a non-compact model requires the field to decay "
                         "inside the truncated chart");
  }
}

} // namespace

Array axis_derivative(const BaseGrid& grid, const Array& vals, int axis, StencilOrder order) {
  check_resolution(grid, order);
  if (axis < 0 || axis >= grid.model().dim()) {
    throw std::invalid_argument("axis out of range");
  }
  Array out = Array::Zero(vals.size());
  for (int b = 0; b < grid.block_count(); ++b) {
    const GridBlock& blk = grid.block(b);
    const int n = blk.dims[axis];
    const int n_other = blk.dims[1 - axis];
    const double inv_h = 1.0 / blk.spacing[axis];
    for (int j = 0; j < n_other; ++j) {
      for (int i = 0; i < n; ++i) {
        const Stencil& st = pick_stencil(order, blk.edge[axis], i, n);
        double acc = 0.0;
        for (std::size_t c = 0; c < st.coefs.size(); ++c) {
          if (st.coefs[c] == 0.0) continue;
          int k = i + st.first_offset + static_cast<int>(c);
          if (blk.edge[axis] == EdgeRule::Periodic) k = ((k % n) + n) % n;
          const int node = axis == 0 ? grid.node_index(b, k, j) : grid.node_index(b, j, k);
          acc += st.coefs[c] * vals[node];
        }
        const int node = axis == 0 ? grid.node_index(b, i, j) : grid.node_index(b, j, i);
        out[node] = acc * inv_h;
      }
    }
  }
  return out;
}

VectorField grad_sigma(const ScalarField& f, StencilOrder order) {
  const BaseGrid& grid = f.grid();
  const int m = grid.model().dim();
  VectorField out(f.grid_ptr());
  std::array<Array, 2> df;
  for (int a = 0; a < m; ++a) df[a] = axis_derivative(grid, f.values, a, order);
  for (int node = 0; node < grid.node_count(); ++node) {
    const Matrix ginv = grid.model().metric_inverse_at(grid.point(node));
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      for (int j = 0; j < m; ++j) v += ginv(i, j) * df[j][node];
      out.comp[i][node] = v;
    }
  }
  return out;
}

ScalarField div_sigma(const VectorField& v, StencilOrder order) {
  const BaseGrid& grid = v.grid();
  const int m = grid.model().dim();
  const int n = grid.node_count();
  Array sqrt_det(n);
  for (int node = 0; node < n; ++node) {
    sqrt_det[node] = grid.model().sqrt_det_metric_at(grid.point(node));
  }
  ScalarField out(v.grid_ptr());
  for (int a = 0; a < m; ++a) {
    Array flux = sqrt_det * v.comp[a];
    out.values += axis_derivative(grid, flux, a, order);
  }
  out.values /= sqrt_det;
  return out;
}

double integrate(const ScalarField& f) {
  const BaseGrid& grid = f.grid();
  if (!grid.model().compact()) require_decay_on_boundary(f);
  double acc = 0.0;
  for (int node = 0; node < grid.node_count(); ++node) acc += f.values[node] * grid.weight(node);
  return acc;
}

double interpolate(const ScalarField& f, const BasePoint& p_in) {
  const BaseGrid& grid = f.grid();
  const BaseManifold& model = grid.model();
  if (model.kind() == BaseKind::RoundSphere2) {
    throw std::logic_error("interpolation on the two-chart sphere grid is not supported");
  }
  const BasePoint p = model.reduce(p_in);
  const GridBlock& blk = grid.block(0);
  const int m = model.dim();

  std::array<int, 2> i{0, 0};
  std::array<double, 2> s{0.0, 0.0};
  for (int a = 0; a < m; ++a) {
    double rel = (p.coords[a] - blk.origin[a]) / blk.spacing[a];
    if (blk.edge[a] == EdgeRule::OneSided) {
      if (rel < 0.0 || rel > blk.dims[a] - 1) {
        throw std::domain_error("interpolation point outside the truncated chart");
      }
      rel = std::min(rel, static_cast<double>(blk.dims[a]) - 1.000000001);
    }
    i[a] = static_cast<int>(std::floor(rel));
    s[a] = rel - i[a];
  }
  auto value = [&](int d0, int d1) {
    int k0 = i[0] + d0;
    int k1 = m == 2 ? i[1] + d1 : 0;
    if (blk.edge[0] == EdgeRule::Periodic) k0 %= blk.dims[0];
    if (m == 2 && blk.edge[1] == EdgeRule::Periodic) k1 %= blk.dims[1];
    return f.values[grid.node_index(0, k0, k1)];
  };
  if (m == 1) return (1.0 - s[0]) * value(0, 0) + s[0] * value(1, 0);
  return (1.0 - s[0]) * (1.0 - s[1]) * value(0, 0) + s[0] * (1.0 - s[1]) * value(1, 0) +
         (1.0 - s[0]) * s[1] * value(0, 1) + s[0] * s[1] * value(1, 1);
}

namespace {

double circle_quadrature(const BaseManifold& model,
                         const std::function<double(const BasePoint&)>& f, double r,
                         const BasePoint& o, int samples) {
  if (model.compact()) {
    throw std::invalid_argument("geodesic sphere quadrature restricted to the plane model; the "
                                "requested radius exceeds the injectivity bound of a compact "
                                "model");
  }
  if (model.kind() != BaseKind::EuclideanPlane) {
    throw std::invalid_argument("geodesic sphere quadrature requires the plane model");
  }
  if (r <= 0.0) throw std::invalid_argument("radius must be positive");
  double acc = 0.0;
  const double dtheta = 2.0 * EIGEN_PI / samples;
  for (int k = 0; k < samples; ++k) {
    const double theta = k * dtheta;
    BasePoint p;
    p.coords[0] = o.coords[0] + r * std::cos(theta);
    p.coords[1] = o.coords[1] + r * std::sin(theta);
    acc += f(p);
  }
  return acc * r * dtheta;
}

} // namespace

double boundary_sphere_integral(const ScalarField& field, double r, const BasePoint& o,
                                int angular_samples) {
  return circle_quadrature(field.grid().model(),
                           [&](const BasePoint& p) { return interpolate(field, p); }, r, o,
                           angular_samples);
}

double boundary_sphere_integral(const BaseManifold& model,
                                const std::function<double(const BasePoint&)>& f, double r,
                                const BasePoint& o, int angular_samples) {
  return circle_quadrature(model, f, r, o, angular_samples);
}

VectorField grad_metric(const ScalarField& f, const SymTensorField& g, StencilOrder order) {
  const BaseGrid& grid = f.grid();
  const int m = grid.model().dim();
  VectorField out(f.grid_ptr());
  std::array<Array, 2> df;
  for (int a = 0; a < m; ++a) df[a] = axis_derivative(grid, f.values, a, order);
  for (int node = 0; node < grid.node_count(); ++node) {
    const Matrix ginv = sym_inverse(g, node, m);
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      for (int j = 0; j < m; ++j) v += ginv(i, j) * df[j][node];
      out.comp[i][node] = v;
    }
  }
  return out;
}

ScalarField div_metric(const VectorField& v, const SymTensorField& g, StencilOrder order) {
  const BaseGrid& grid = v.grid();
  const int m = grid.model().dim();
  const int n = grid.node_count();
  Array sqrt_det(n);
  for (int node = 0; node < n; ++node) sqrt_det[node] = std::sqrt(g.det(node, m));
  ScalarField out(v.grid_ptr());
  for (int a = 0; a < m; ++a) {
    Array flux = sqrt_det * v.comp[a];
    out.values += axis_derivative(grid, flux, a, order);
  }
  out.values /= sqrt_det;
  return out;
}

ScalarField weighted_laplacian(const ScalarField& f, const ScalarField& weight,
                               const SymTensorField& g, StencilOrder order) {
  VectorField flux = grad_metric(f, g, order);
  const int m = f.grid().model().dim();
  for (int a = 0; a < m; ++a) flux.comp[a] *= weight.values;
  ScalarField out = div_metric(flux, g, order);
  out.values /= weight.values;
  return out;
}

std::vector<std::vector<Matrix>> metric_christoffels(const SymTensorField& g, StencilOrder order) {
  const BaseGrid& grid = g.grid();
  const int m = grid.model().dim();
  const int n = grid.node_count();

  // d_k of each metric component.
  std::array<Array, 2> d00, d01, d11;
  for (int k = 0; k < m; ++k) {
    d00[k] = axis_derivative(grid, g.c00, k, order);
    if (m == 2) {
      d01[k] = axis_derivative(grid, g.c01, k, order);
      d11[k] = axis_derivative(grid, g.c11, k, order);
    }
  }
  auto dg = [&](int node, int k, int i, int j) {
    if (i == 0 && j == 0) return d00[k][node];
    if (i == 1 && j == 1) return d11[k][node];
    return d01[k][node];
  };

  std::vector<std::vector<Matrix>> gamma(n);
  for (int node = 0; node < n; ++node) {
    const Matrix ginv = sym_inverse(g, node, m);
    gamma[node].assign(m, Matrix::Zero(m, m));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
          double s = 0.0;
          for (int l = 0; l < m; ++l) {
            s += ginv(i, l) * (dg(node, j, l, k) + dg(node, k, l, j) - dg(node, l, j, k));
          }
          gamma[node][i](j, k) = 0.5 * s;
        }
      }
    }
  }
  return gamma;
}

double integrate_metric(const ScalarField& f, const SymTensorField& g) {
  const BaseGrid& grid = f.grid();
  if (!grid.model().compact()) {
    throw NonCompactBase("metric-volume integration requires a compact base");
  }
  const int m = grid.model().dim();
  double acc = 0.0;
  for (int node = 0; node < grid.node_count(); ++node) {
    acc += f.values[node] * grid.cell_weight(node) * std::sqrt(g.det(node, m));
  }
  return acc;
}

} // namespace dwarp
