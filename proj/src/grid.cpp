#include "dwarp/grid.hpp"

#include <cmath>
#include <sstream>

namespace dwarp {

namespace {

constexpr double kTwoPi = 2.0 * EIGEN_PI;

double wrap_periodic(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}

// Quintic smoothstep: 0 at s<=0, 1 at s>=1, C^2 in between.
double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// Sphere partition-of-unity ramp on |y|/R: 1 inside the equatorial disk,
// 0 beyond 1.5 R in the own chart.
double sphere_chart_ramp(double s) { return 1.0 - smoothstep((s - 1.0) / 0.5); }

} // namespace

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::Circle: return "circle";
    case BaseKind::FlatTorus2: return "torus2";
    case BaseKind::RoundSphere2: return "sphere2";
    case BaseKind::EuclideanPlane: return "plane";
  }
  return "unknown";
}

BaseManifold BaseManifold::circle(double radius) {
  if (radius <= 0.0) throw ConfigError("circle radius must be positive");
  return BaseManifold(BaseKind::Circle, 1, radius, 0.0);
}

BaseManifold BaseManifold::flat_torus(double period0, double period1) {
  if (period0 <= 0.0 || period1 <= 0.0) throw ConfigError("torus periods must be positive");
  return BaseManifold(BaseKind::FlatTorus2, 2, period0, period1);
}

BaseManifold BaseManifold::round_sphere(double radius) {
  if (radius <= 0.0) throw ConfigError("sphere radius must be positive");
  return BaseManifold(BaseKind::RoundSphere2, 2, radius, 0.0);
}

BaseManifold BaseManifold::euclidean_plane(double half_width) {
  if (half_width <= 0.0) throw ConfigError("plane half width must be positive");
  return BaseManifold(BaseKind::EuclideanPlane, 2, half_width, 0.0);
}

bool BaseManifold::compact() const {
  return kind_ == BaseKind::Circle || kind_ == BaseKind::FlatTorus2 ||
         kind_ == BaseKind::RoundSphere2;
}

Matrix BaseManifold::metric_at(const BasePoint& p) const {
  Matrix g = Matrix::Identity(dim_, dim_);
  switch (kind_) {
    case BaseKind::Circle:
      g(0, 0) = par0_ * par0_;
      break;
    case BaseKind::FlatTorus2:
    case BaseKind::EuclideanPlane:
      break;
    case BaseKind::RoundSphere2: {
      const double R2 = par0_ * par0_;
      const double r2 = p.coords.squaredNorm();
      const double c = 4.0 * R2 * R2 / ((R2 + r2) * (R2 + r2));
      g *= c;
      break;
    }
  }
  return g;
}

Matrix BaseManifold::metric_inverse_at(const BasePoint& p) const {
  Matrix g = metric_at(p);
  if (dim_ == 1) {
    g(0, 0) = 1.0 / g(0, 0);
    return g;
  }
  return g.inverse();
}

double BaseManifold::sqrt_det_metric_at(const BasePoint& p) const {
  const Matrix g = metric_at(p);
  const double det = dim_ == 1 ? g(0, 0) : g.determinant();
  return std::sqrt(det);
}

std::vector<Matrix> BaseManifold::metric_deriv_at(const BasePoint& p) const {
  std::vector<Matrix> d(dim_, Matrix::Zero(dim_, dim_));
  if (kind_ == BaseKind::RoundSphere2) {
    const double R2 = par0_ * par0_;
    const double r2 = p.coords.squaredNorm();
    const double denom = R2 + r2;
    // d_k [4R^4 (R^2+r^2)^-2] = -16 R^4 y_k (R^2+r^2)^-3
    for (int k = 0; k < dim_; ++k) {
      const double val = -16.0 * R2 * R2 * p.coords[k] / (denom * denom * denom);
      d[k] = val * Matrix::Identity(dim_, dim_);
    }
  }
  return d;
}

std::vector<Matrix> BaseManifold::christoffels_at(const BasePoint& p) const {
  std::vector<Matrix> gamma(dim_, Matrix::Zero(dim_, dim_));
  const auto d = metric_deriv_at(p);
  bool flat = true;
  for (const auto& dk : d) {
    if (dk.cwiseAbs().maxCoeff() > 0.0) flat = false;
  }
  if (flat) return gamma;
  const Matrix ginv = metric_inverse_at(p);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        double s = 0.0;
        for (int l = 0; l < dim_; ++l) {
          s += ginv(i, l) * (d[j](l, k) + d[k](l, j) - d[l](j, k));
        }
        gamma[i](j, k) = 0.5 * s;
      }
    }
  }
  return gamma;
}

BasePoint BaseManifold::reduce(const BasePoint& p) const {
  BasePoint q = p;
  if (kind_ == BaseKind::Circle) {
    q.coords[0] = wrap_periodic(p.coords[0], kTwoPi);
  } else if (kind_ == BaseKind::FlatTorus2) {
    q.coords[0] = wrap_periodic(p.coords[0], par0_);
    q.coords[1] = wrap_periodic(p.coords[1], par1_);
  }
  return q;
}

BasePoint BaseManifold::to_other_chart(const BasePoint& p) const {
  if (kind_ != BaseKind::RoundSphere2) {
    throw std::logic_error("chart transition is defined for the sphere model only");
  }
  const double R2 = par0_ * par0_;
  const double r2 = p.coords.squaredNorm();
  if (r2 == 0.0) throw std::domain_error("chart transition undefined at the chart origin");
  BasePoint q;
  q.chart = 1 - p.chart;
  q.coords[0] = R2 * p.coords[0] / r2;
  q.coords[1] = -R2 * p.coords[1] / r2;
  return q;
}

Matrix BaseManifold::chart_transition_jacobian(const BasePoint& p) const {
  if (kind_ != BaseKind::RoundSphere2) {
    throw std::logic_error("chart transition is defined for the sphere model only");
  }
  const double R2 = par0_ * par0_;
  const double x = p.coords[0];
  const double y = p.coords[1];
  const double r2 = x * x + y * y;
  if (r2 == 0.0) throw std::domain_error("chart transition undefined at the chart origin");
  const double r4 = r2 * r2;
  Matrix J(2, 2);
  J(0, 0) = R2 * (r2 - 2.0 * x * x) / r4;
  J(0, 1) = -2.0 * R2 * x * y / r4;
  J(1, 0) = 2.0 * R2 * x * y / r4;
  J(1, 1) = -R2 * (r2 - 2.0 * y * y) / r4;
  return J;
}

double BaseManifold::eigenvalue_floor() const {
  switch (kind_) {
    case BaseKind::Circle: return par0_ * par0_;
    case BaseKind::FlatTorus2:
    case BaseKind::EuclideanPlane: return 1.0;
    case BaseKind::RoundSphere2: {
      const double R2 = par0_ * par0_;
      const double b = sphere_chart_extent();
      const double worst = R2 + 2.0 * b * b;
      return 4.0 * R2 * R2 / (worst * worst);
    }
  }
  return 0.0;
}

std::string BaseManifold::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case BaseKind::Circle: out << "circle(radius=" << par0_ << ")"; break;
    case BaseKind::FlatTorus2: out << "torus2(periods=" << par0_ << "," << par1_ << ")"; break;
    case BaseKind::RoundSphere2: out << "sphere2(radius=" << par0_ << ")"; break;
    case BaseKind::EuclideanPlane: out << "plane(half_width=" << par0_ << ")"; break;
  }
  return out.str();
}

BaseGrid::BaseGrid(std::shared_ptr<const BaseManifold> model, std::array<int, 2> n)
    : model_(std::move(model)) {
  const int m = model_->dim();
  for (int a = 0; a < m; ++a) {
    if (n[a] < 2) throw ConfigError("grid needs at least 2 nodes per coordinate");
  }
  switch (model_->kind()) {
    case BaseKind::Circle: {
      GridBlock blk;
      blk.dims = {n[0], 1};
      blk.spacing = {kTwoPi / n[0], 0.0};
      blk.edge = {EdgeRule::Periodic, EdgeRule::Periodic};
      blocks_.push_back(blk);
      break;
    }
    case BaseKind::FlatTorus2: {
      GridBlock blk;
      blk.dims = {n[0], n[1]};
      blk.spacing = {model_->period(0) / n[0], model_->period(1) / n[1]};
      blk.edge = {EdgeRule::Periodic, EdgeRule::Periodic};
      blocks_.push_back(blk);
      break;
    }
    case BaseKind::EuclideanPlane: {
      GridBlock blk;
      const double L = model_->half_width();
      blk.dims = {n[0], n[1]};
      blk.origin = {-L, -L};
      blk.spacing = {2.0 * L / (n[0] - 1), 2.0 * L / (n[1] - 1)};
      blk.edge = {EdgeRule::OneSided, EdgeRule::OneSided};
      blocks_.push_back(blk);
      break;
    }
    case BaseKind::RoundSphere2: {
      const double b = model_->sphere_chart_extent();
      for (int chart = 0; chart < 2; ++chart) {
        GridBlock blk;
        blk.chart = chart;
        blk.dims = {n[0], n[0]};
        blk.origin = {-b, -b};
        blk.spacing = {2.0 * b / (n[0] - 1), 2.0 * b / (n[0] - 1)};
        blk.edge = {EdgeRule::OneSided, EdgeRule::OneSided};
        blocks_.push_back(blk);
      }
      break;
    }
  }
  int offset = 0;
  for (auto& blk : blocks_) {
    blk.offset = offset;
    offset += blk.node_count();
  }
  node_count_ = offset;

  weights_.resize(node_count_);
  cell_weights_.resize(node_count_);
  for (int node = 0; node < node_count_; ++node) {
    int bi, i0, i1;
    local_coords(node, bi, i0, i1);
    const GridBlock& blk = blocks_[bi];
    double cell = 1.0;
    const std::array<int, 2> idx{i0, i1};
    for (int a = 0; a < m; ++a) {
      double w = blk.spacing[a];
      if (blk.edge[a] == EdgeRule::OneSided && (idx[a] == 0 || idx[a] == blk.dims[a] - 1)) {
        w *= 0.5; // trapezoid end weight
      }
      cell *= w;
    }
    const BasePoint p = point(node);
    double blend = 1.0;
    if (model_->kind() == BaseKind::RoundSphere2) {
      const double R = model_->radius();
      const double own = sphere_chart_ramp(p.coords.norm() / R);
      const double r = p.coords.norm();
      const double other = r == 0.0 ? 0.0 : sphere_chart_ramp(R / r);
      blend = (own + other) > 0.0 ? own / (own + other) : 0.0;
    }
    cell_weights_[node] = cell * blend;
    weights_[node] = cell_weights_[node] * model_->sqrt_det_metric_at(p);
  }
}

std::shared_ptr<const BaseGrid> BaseGrid::make(std::shared_ptr<const BaseManifold> model, int n) {
  return std::make_shared<const BaseGrid>(std::move(model), std::array<int, 2>{n, n});
}

std::shared_ptr<const BaseGrid> BaseGrid::make(std::shared_ptr<const BaseManifold> model, int n0,
                                               int n1) {
  return std::make_shared<const BaseGrid>(std::move(model), std::array<int, 2>{n0, n1});
}

BasePoint BaseGrid::point(int node) const {
  int bi, i0, i1;
  local_coords(node, bi, i0, i1);
  const GridBlock& blk = blocks_[bi];
  BasePoint p;
  p.chart = blk.chart;
  p.coords[0] = blk.origin[0] + i0 * blk.spacing[0];
  p.coords[1] = blk.origin[1] + i1 * blk.spacing[1];
  return p;
}

int BaseGrid::block_of(int node) const {
  for (int b = static_cast<int>(blocks_.size()) - 1; b >= 0; --b) {
    if (node >= blocks_[b].offset) return b;
  }
  return 0;
}

void BaseGrid::local_coords(int node, int& block, int& i0, int& i1) const {
  block = block_of(node);
  const GridBlock& blk = blocks_[block];
  const int local = node - blk.offset;
  i0 = local % blk.dims[0];
  i1 = local / blk.dims[0];
}

int BaseGrid::node_index(int block, int i0, int i1) const {
  const GridBlock& blk = blocks_[block];
  return blk.offset + i1 * blk.dims[0] + i0;
}

double BaseGrid::spacing_max() const {
  double s = 0.0;
  for (const auto& blk : blocks_) {
    for (int a = 0; a < model_->dim(); ++a) s = std::max(s, blk.spacing[a]);
  }
  return s;
}

bool BaseGrid::trusted(int node) const {
  if (model_->kind() != BaseKind::EuclideanPlane) return true;
  int bi, i0, i1;
  local_coords(node, bi, i0, i1);
  const GridBlock& blk = blocks_[bi];
  const int band = 4; // two stencil widths of the widest (nested) stencil
  return i0 >= band && i0 < blk.dims[0] - band && i1 >= band && i1 < blk.dims[1] - band;
}

int BaseGrid::neighbor(int node, int axis, int step) const {
  int bi, i0, i1;
  local_coords(node, bi, i0, i1);
  const GridBlock& blk = blocks_[bi];
  std::array<int, 2> idx{i0, i1};
  idx[axis] += step;
  if (blk.edge[axis] == EdgeRule::Periodic) {
    idx[axis] = ((idx[axis] % blk.dims[axis]) + blk.dims[axis]) % blk.dims[axis];
  } else if (idx[axis] < 0 || idx[axis] >= blk.dims[axis]) {
    return -1;
  }
  return node_index(bi, idx[0], idx[1]);
}

ScalarField sample_scalar(GridPtr grid, const std::function<double(const BasePoint&)>& f) {
  ScalarField out(grid);
  for (int i = 0; i < grid->node_count(); ++i) out.values[i] = f(grid->point(i));
  return out;
}

} // namespace dwarp
