// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "mpfeec/quadrature.hpp"

namespace mpfeec {

/// Univariate B-spline space S^p_alpha on [0,1] with an open knot vector.
///
/// The basis is the standard B-spline basis (L-infinity normalized,
/// partition of unity), which carries the endpoint interpolation property
/// lambda_0(0) = 1, lambda_n(1) = 1. Evaluation at x = 1 uses the left
/// limit. Immutable after construction.
class UnivariateSplineSpace {
public:
  UnivariateSplineSpace() = default;

  int degree() const { return degree_; }
  int dimension() const { return int(knots_.size()) - degree_ - 1; }
  /// n such that the basis indices run 0..n.
  int last_index() const { return dimension() - 1; }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<int>& regularity() const { return regularity_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Values (deriv=0) or first derivatives (deriv=1) of the <= p+1 basis
  /// functions active at x. Returns the index of the first active function.
  int eval_basis(double x, int deriv, Eigen::ArrayXd& values) const;

  /// Value of a spline with the given coefficients at x.
  double eval(const Eigen::VectorXd& coeffs, double x, int deriv = 0) const;

  /// Open support (t_i, t_{i+p+1}) of basis function i.
  std::pair<double, double> support(int i) const;

  /// Smallest support diameter among all basis functions, (n+1)^{-1} scale.
  double min_support_diameter() const;

  /// Space of derivatives S^{p-1}_{alpha-1}; dimension n.
  UnivariateSplineSpace derivative_space() const;

  /// Space with mirrored breakpoints (x -> 1-x).
  UnivariateSplineSpace mirrored() const;

  /// True iff the knot pattern is symmetric under x -> 1-x.
  bool is_symmetric(double tol = 1e-12) const;

  /// Mass matrix int lambda_i lambda_j.
  Eigen::MatrixXd gram_matrix() const;

  /// Greville abscissae (knot averages).
  Eigen::VectorXd greville_points() const;

  friend UnivariateSplineSpace make_space(int degree,
                                          const std::vector<double>& breaks,
                                          const std::vector<int>& regularity);

private:
  int degree_ = 0;
  std::vector<double> breakpoints_;
  std::vector<int> regularity_;
  std::vector<double> knots_;

  int find_span(double x) const;
};

/// Builds S^p_alpha on the given breakpoints; regularity has one entry per
/// interior breakpoint, 0 <= alpha < p. Throws InvalidKnots on bad input.
UnivariateSplineSpace make_space(int degree, const std::vector<double>& breaks,
                                 const std::vector<int>& regularity);

/// Convenience: uniform breakpoints with maximal regularity p-1.
UnivariateSplineSpace make_uniform_space(int degree, int cells);

/// Dyadic refinement: every span split in two, same degree/regularity.
UnivariateSplineSpace refine_dyadic(const UnivariateSplineSpace& s,
                                    int levels = 1);

/// Maps coefficients of f in V0 to coefficients of f' in V1 (n x (n+1)).
Eigen::MatrixXd differentiation_matrix(const UnivariateSplineSpace& space);

/// Maps g in V1 to G in V0 with G' = g and G(c) = 0 ((n+1) x n).
Eigen::MatrixXd antiderivative_matrix(const UnivariateSplineSpace& space,
                                      double constant_at);

enum class DualKind { L2Gram, GrevilleInterp };

/// Dual basis of a univariate space. For L2Gram duals, theta_i =
/// sum_j (M^{-1})_{ij} lambda_j and the action on f is computed from the
/// moments int lambda_j f by quadrature. The Greville variant realizes the
/// dual action through collocation at the Greville abscissae.
class DualBasis1D {
public:
  DualBasis1D() = default;
  DualBasis1D(const UnivariateSplineSpace& space, DualKind kind);

  DualKind kind() const { return kind_; }
  const Eigen::MatrixXd& gram_matrix() const { return gram_; }
  /// Coefficients of theta_i in the lambda basis (L2Gram kind).
  const Eigen::MatrixXd& coefficient_matrix() const { return coeffs_; }

  /// <theta_i, f> for all i; f smooth, integrated with the given per-cell
  /// Gauss order (L2Gram) or evaluated at Greville points.
  Eigen::VectorXd apply(const UnivariateSplineSpace& space,
                        const std::function<double(double)>& f,
                        int quad_points) const;

  /// Solves the dual system for a vector of moments int lambda_i f.
  Eigen::VectorXd solve_moments(const Eigen::VectorXd& moments) const;

  /// Solves the collocation system for values at Greville points.
  Eigen::VectorXd solve_values(const Eigen::VectorXd& values) const;

private:
  DualKind kind_ = DualKind::L2Gram;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd coeffs_;
  Eigen::PartialPivLU<Eigen::MatrixXd> gram_lu_;
  Eigen::MatrixXd colloc_;
  Eigen::PartialPivLU<Eigen::MatrixXd> colloc_lu_;
  Eigen::VectorXd greville_;
};

/// True iff V0(coarse) is a subspace of V0(fine): degree_c <= degree_f and
/// every coarse knot appears in the fine vector with multiplicity at least
/// mult_c + (degree_f - degree_c).
bool is_nested(const UnivariateSplineSpace& coarse,
               const UnivariateSplineSpace& fine, double tol = 1e-12);

/// Expansion of the (possibly orientation-reversed) coarse basis in the fine
/// basis: column i of the result holds fine coefficients of
/// lambda^c_i(eta(s)) with eta(s) = 1-s when flip is set. Requires
/// nestedness; max_residual receives the L-infinity reconstruction residual
/// on a sample grid.
Eigen::MatrixXd expansion_matrix(const UnivariateSplineSpace& coarse,
                                 const UnivariateSplineSpace& fine, bool flip,
                                 double* max_residual = nullptr);

} // namespace mpfeec
