// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <map>

#include "mpfeec/quadrature.hpp"
#include "mpfeec/univariate.hpp"

namespace mpfeec {

using Vec2 = Eigen::Vector2d;

/// Tensor index (i1, i2) with i1 fastest: flat = i1 + (n+1) * i2.
struct TensorIndex {
  int i1 = 0, i2 = 0;
  static TensorIndex unflatten(int flat, int fast_dim) {
    return {flat % fast_dim, flat / fast_dim};
  }
  int flatten(int fast_dim) const { return i1 + fast_dim * i2; }
};

/// Sparse Kronecker product slow (x) fast: flat = fast + nfast * slow.
Eigen::SparseMatrix<double> kron_sparse(const Eigen::MatrixXd& slow,
                                        const Eigen::MatrixXd& fast);

/// Logical de Rham triple V0 = V(x)V, V1 = (V' (x) V, V (x) V'), V2 = V'(x)V'
/// on the unit square, both directions sharing one univariate space.
class LogicalDeRham {
public:
  LogicalDeRham() = default;
  explicit LogicalDeRham(UnivariateSplineSpace base,
                         DualKind duals = DualKind::L2Gram);

  const UnivariateSplineSpace& v0() const { return v0_; }
  const UnivariateSplineSpace& v1() const { return v1_; }
  const DualBasis1D& duals() const { return duals_; }
  const Eigen::MatrixXd& diff() const { return diff_; }

  int n() const { return v0_.last_index(); } // basis indices 0..n per dir
  int dim0() const { return (n() + 1) * (n() + 1); }
  int dim1() const { return 2 * n() * (n() + 1); }
  int dim2() const { return n() * n(); }
  /// offset of the second V1 block (V (x) V').
  int block1_offset() const { return n() * (n() + 1); }

  /// Coefficient-level gradient (dim1 x dim0) and curl (dim2 x dim1).
  const Eigen::SparseMatrix<double>& grad_matrix() const { return grad_; }
  const Eigen::SparseMatrix<double>& curl_matrix() const { return curl_; }
  /// Mixed second derivative d1 d2 : V0 -> V2 (dim2 x dim0).
  const Eigen::SparseMatrix<double>& mixed_matrix() const { return mixed_; }
  /// Directional derivative d_axis : V0 -> V1 block `axis` (dim1 x dim0).
  const Eigen::SparseMatrix<double>& dir_grad_matrix(int axis) const {
    return dir_grad_[axis];
  }

  /// Pointwise evaluation of logical fields from coefficients.
  double eval0(const Eigen::VectorXd& c, const Vec2& x) const;
  Vec2 eval1(const Eigen::VectorXd& c, const Vec2& x) const;
  double eval2(const Eigen::VectorXd& c, const Vec2& x) const;
  Vec2 grad_eval0(const Eigen::VectorXd& c, const Vec2& x) const;

private:
  UnivariateSplineSpace v0_, v1_;
  DualBasis1D duals_;
  Eigen::MatrixXd diff_;
  Eigen::SparseMatrix<double> grad_, curl_, mixed_;
  Eigen::SparseMatrix<double> dir_grad_[2];
};

/// L2-type projection on V0: coefficients of the tensor dual action on f.
Eigen::VectorXd project0_logical(const LogicalDeRham& spaces,
                                 const std::function<double(const Vec2&)>& f,
                                 const QuadratureSpec& quad);

/// Projection on V1 via directional antiderivatives and dual projection.
Eigen::VectorXd project1_logical(const LogicalDeRham& spaces,
                                 const std::function<Vec2(const Vec2&)>& u,
                                 const QuadratureSpec& quad);

/// Projection on V2 via the bivariate antiderivative.
Eigen::VectorXd project2_logical(const LogicalDeRham& spaces,
                                 const std::function<double(const Vec2&)>& f,
                                 const QuadratureSpec& quad);

Eigen::VectorXd grad_logical(const LogicalDeRham& spaces,
                             const Eigen::VectorXd& c0);
Eigen::VectorXd curl_logical(const LogicalDeRham& spaces,
                             const Eigen::VectorXd& c1);

/// Axis-aligned box in [0,1]^2.
struct LogicalBox {
  Vec2 lo{0, 0}, hi{1, 1};
  bool empty() const {
    return lo[0] > hi[0] + 1e-15 || lo[1] > hi[1] + 1e-15;
  }
  bool contains(const LogicalBox& other) const {
    return other.empty() || (lo[0] <= other.lo[0] + 1e-12 &&
                             lo[1] <= other.lo[1] + 1e-12 &&
                             hi[0] >= other.hi[0] - 1e-12 &&
                             hi[1] >= other.hi[1] - 1e-12);
  }
};

/// Indices whose (open) support meets the box, and the smallest Cartesian
/// box containing the union of those supports.
struct ExtensionResult {
  std::pair<int, int> range1{0, -1}; // inclusive index ranges, empty if 1<0
  std::pair<int, int> range2{0, -1};
  LogicalBox extension;
  bool empty() const { return range1.second < range1.first; }
};

ExtensionResult extension_index_set(const LogicalDeRham& spaces,
                                    const LogicalBox& box);

/// One-direction support extension on an arbitrary univariate space.
std::pair<double, double> extend_interval(const UnivariateSplineSpace& space,
                                          double lo, double hi);

/// Lazy cumulative integral G(x1,x2) = int_0^{x1} int_0^{x2} f, with
/// memoized prefix tables (outer direction keyed by the x2 coordinate).
class BoxIntegral2D {
public:
  BoxIntegral2D(std::function<double(const Vec2&)> f,
                std::vector<double> breaks1, std::vector<double> breaks2,
                int quad_points);

  double corner(double x1, double x2) const;
  double box(const Vec2& lo, const Vec2& hi) const {
    return corner(hi[0], hi[1]) - corner(lo[0], hi[1]) -
           corner(hi[0], lo[1]) + corner(lo[0], lo[1]);
  }

private:
  std::function<double(const Vec2&)> f_;
  std::vector<double> breaks1_, breaks2_;
  int nq_;
  mutable std::map<double, Prefix1D> inner_; // key z1: t -> int_0^t f(z1,.)
  mutable std::map<double, Prefix1D> outer_; // key x2: s -> int_0^s h_{x2}
  mutable std::map<std::pair<double, double>, double> memo_;

  double inner_eval(double z1, double x2) const;
};

} // namespace mpfeec
