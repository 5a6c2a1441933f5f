#pragma once

#include "dwarp/common.hpp"

#include <array>
#include <memory>
#include <vector>

namespace dwarp {

/// A point of the base manifold in chart coordinates. Only the first
/// dim() entries of coords are meaningful. The chart index matters only for
/// the two-chart sphere model; single-chart models ignore it.
struct BasePoint {
  Eigen::Vector2d coords{0.0, 0.0};
  int chart = 0;

  static BasePoint of(double c0) { return BasePoint{{c0, 0.0}, 0}; }
  static BasePoint of(double c0, double c1, int chart = 0) { return BasePoint{{c0, c1}, chart}; }
};

enum class BaseKind { Circle, FlatTorus2, RoundSphere2, EuclideanPlane };

std::string to_string(BaseKind kind);

/// Analytic chart model of a Riemannian base manifold: metric components,
/// their chart derivatives, and chart bookkeeping. Dimensions 1 and 2 only.
///
/// Models and their positive eigenvalue floors for sigma:
///   Circle(R)        sigma = R^2,            floor R^2
///   FlatTorus2(L)    sigma = I,              floor 1
///   RoundSphere2(R)  sigma = c(y) I with c = 4R^4/(R^2+|y|^2)^2; on the
///                    chart squares used by grids, floor 4R^4/(R^2+2 b^2)^2
///                    with b the chart half-width (1.55 R)
///   EuclideanPlane   sigma = I,              floor 1
class BaseManifold {
public:
  static BaseManifold circle(double radius = 1.0);
  static BaseManifold flat_torus(double period0 = 2.0 * EIGEN_PI, double period1 = 2.0 * EIGEN_PI);
  static BaseManifold round_sphere(double radius = 1.0);
  static BaseManifold euclidean_plane(double half_width = 6.0);

  BaseKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool compact() const;
  int chart_count() const { return kind_ == BaseKind::RoundSphere2 ? 2 : 1; }

  Matrix metric_at(const BasePoint& p) const;
  Matrix metric_inverse_at(const BasePoint& p) const;
  double sqrt_det_metric_at(const BasePoint& p) const;
  /// deriv[k](i,j) = d_k sigma_ij
  std::vector<Matrix> metric_deriv_at(const BasePoint& p) const;
  /// Christoffel symbols of sigma: gamma[i](j,k).
  std::vector<Matrix> christoffels_at(const BasePoint& p) const;

  /// Reduces periodic coordinates to the fundamental domain.
  BasePoint reduce(const BasePoint& p) const;

  /// Sphere only: the same point expressed in the other chart, and the
  /// Jacobian d(other)/d(own) of that transition.
  BasePoint to_other_chart(const BasePoint& p) const;
  Matrix chart_transition_jacobian(const BasePoint& p) const;

  double eigenvalue_floor() const;

  double radius() const { return par0_; }
  double period(int axis) const { return axis == 0 ? par0_ : par1_; }
  double half_width() const { return par0_; }
  /// Sphere chart square half-width (chart units).
  double sphere_chart_extent() const { return 1.55 * par0_; }

  std::string describe() const;

private:
  BaseManifold(BaseKind kind, int dim, double par0, double par1)
      : kind_(kind), dim_(dim), par0_(par0), par1_(par1) {}

  BaseKind kind_;
  int dim_;
  double par0_;
  double par1_;
};

enum class EdgeRule { Periodic, OneSided };

/// One rectangular lattice of a grid, tied to a chart of the model.
struct GridBlock {
  int chart = 0;
  std::array<int, 2> dims{1, 1};
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> spacing{0.0, 0.0};
  std::array<EdgeRule, 2> edge{EdgeRule::Periodic, EdgeRule::Periodic};
  int offset = 0;

  int node_count() const { return dims[0] * dims[1]; }
};

/// Uniform chart lattice over a base model with quadrature weights.
/// Periodic models tile the fundamental domain with no duplicated seam node.
/// The sphere uses two chart blocks with a partition of unity; the plane is
/// truncated to its chart square with a trust region excluding the outermost
/// band of nodes (two stencil widths).
class BaseGrid {
public:
  /// n nodes per coordinate (m = 1 uses n0 only; the sphere uses n0 per
  /// chart block axis).
  BaseGrid(std::shared_ptr<const BaseManifold> model, std::array<int, 2> n);

  static std::shared_ptr<const BaseGrid> make(std::shared_ptr<const BaseManifold> model, int n);
  static std::shared_ptr<const BaseGrid> make(std::shared_ptr<const BaseManifold> model, int n0, int n1);

  const BaseManifold& model() const { return *model_; }
  std::shared_ptr<const BaseManifold> model_ptr() const { return model_; }

  int node_count() const { return node_count_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const GridBlock& block(int b) const { return blocks_[b]; }

  BasePoint point(int node) const;
  /// Full quadrature weight: chart cell measure x sqrt(det sigma) x blend.
  double weight(int node) const { return weights_[node]; }
  /// Chart cell measure with blend but without sqrt(det sigma); used when
  /// integrating against a different (e.g. induced) metric.
  double cell_weight(int node) const { return cell_weights_[node]; }

  int block_of(int node) const;
  void local_coords(int node, int& block, int& i0, int& i1) const;
  int node_index(int block, int i0, int i1) const;

  double spacing_max() const;
  double spacing(int axis) const { return blocks_[0].spacing[axis]; }

  /// True for nodes inside the declared trust region (plane: all but the
  /// outermost 2 stencil widths; other models: everywhere).
  bool trusted(int node) const;

  /// Node of the same block stepped along an axis; periodic axes wrap,
  /// one-sided axes return -1 outside the block.
  int neighbor(int node, int axis, int step) const;

private:
  std::shared_ptr<const BaseManifold> model_;
  std::vector<GridBlock> blocks_;
  std::vector<double> weights_;
  std::vector<double> cell_weights_;
  int node_count_ = 0;
};

using GridPtr = std::shared_ptr<const BaseGrid>;

/// Per-node scalar values on a grid.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid) : grid_(std::move(grid)) {
    values = Array::Zero(grid_->node_count());
  }
  ScalarField(GridPtr grid, Array vals) : grid_(std::move(grid)), values(std::move(vals)) {}

  const BaseGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int size() const { return static_cast<int>(values.size()); }

  Array values;

private:
  GridPtr grid_;
};

/// Per-node chart-component vector values (components in each node's own
/// chart frame).
class VectorField {
public:
  VectorField() = default;
  explicit VectorField(GridPtr grid) : grid_(std::move(grid)) {
    for (int a = 0; a < 2; ++a) comp[a] = Array::Zero(grid_->node_count());
  }

  const BaseGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }

  Vector at(int node) const {
    Vector v(grid_->model().dim());
    for (int a = 0; a < v.size(); ++a) v[a] = comp[a][node];
    return v;
  }
  void set(int node, const Vector& v) {
    for (int a = 0; a < v.size(); ++a) comp[a][node] = v[a];
  }

  std::array<Array, 2> comp;

private:
  GridPtr grid_;
};

/// Per-node symmetric m x m tensor values.
class SymTensorField {
public:
  SymTensorField() = default;
  explicit SymTensorField(GridPtr grid) : grid_(std::move(grid)) {
    const int n = grid_->node_count();
    c00 = Array::Zero(n);
    c01 = Array::Zero(n);
    c11 = Array::Zero(n);
  }

  const BaseGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }

  Matrix at(int node) const {
    const int m = grid_->model().dim();
    Matrix g(m, m);
    g(0, 0) = c00[node];
    if (m == 2) {
      g(0, 1) = g(1, 0) = c01[node];
      g(1, 1) = c11[node];
    }
    return g;
  }
  void set(int node, const Matrix& g) {
    c00[node] = g(0, 0);
    if (g.rows() == 2) {
      c01[node] = 0.5 * (g(0, 1) + g(1, 0));
      c11[node] = g(1, 1);
    }
  }
  double det(int node, int m) const {
    return m == 1 ? c00[node] : c00[node] * c11[node] - c01[node] * c01[node];
  }
  /// Smallest eigenvalue (closed form for m <= 2).
  double eigen_min(int node, int m) const {
    if (m == 1) return c00[node];
    const double tr2 = 0.5 * (c00[node] + c11[node]);
    const double d = 0.5 * (c00[node] - c11[node]);
    return tr2 - std::sqrt(d * d + c01[node] * c01[node]);
  }

  Array c00, c01, c11;

private:
  GridPtr grid_;
};

/// Samples an analytic function at every grid node.
ScalarField sample_scalar(GridPtr grid, const std::function<double(const BasePoint&)>& f);

} // namespace dwarp
