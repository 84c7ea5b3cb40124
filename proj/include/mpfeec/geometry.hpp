// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "mpfeec/logical.hpp"
#include "mpfeec/quadrature.hpp"

namespace mpfeec {

using Mat2 = Eigen::Matrix2d;

/// C1 diffeomorphism F : [0,1]^2 -> R^2 with analytic Jacobian.
/// All algorithms work in logical coordinates; the inverse mapping is
/// never required.
struct PatchMapping {
  std::function<Vec2(const Vec2&)> F;
  std::function<Mat2(const Vec2&)> DF;
  std::string kind = "user";
  std::vector<double> params;

  double jacobian_det(const Vec2& xhat) const { return DF(xhat).determinant(); }

  /// max ||DF|| and max ||DF^{-1}|| over a sample grid (operator 2-norms).
  std::pair<double, double> measured_jacobian_bounds(int samples = 20) const;
  /// Patch diameter estimate from boundary samples.
  double diameter(int samples = 20) const;
};

PatchMapping affine_mapping(const Mat2& A, const Vec2& b);
PatchMapping bilinear_mapping(const Vec2& p00, const Vec2& p10,
                              const Vec2& p01, const Vec2& p11);
PatchMapping annulus_sector_mapping(double r0, double r1, double th0,
                                    double th1);

/// Dispatch by kind name ("affine" | "bilinear" | "annulus-sector");
/// params as documented in the scenario format. Validates det DF > 0 on a
/// 20x20 grid and throws DegenerateMapping otherwise.
PatchMapping builtin_mapping(const std::string& kind,
                             const std::vector<double>& params);

/// Throws DegenerateMapping when sampled det DF <= 1e-12.
void check_orientation(const PatchMapping& m, int samples = 20);

// Pullbacks of physical evaluators to the logical chart. The physical
// field is always queried at x = F(xhat), so no mapping inversion occurs.
std::function<double(const Vec2&)> pullback0(
    const PatchMapping& m, const std::function<double(const Vec2&)>& f);
std::function<Vec2(const Vec2&)> pullback1(
    const PatchMapping& m, const std::function<Vec2(const Vec2&)>& u);
std::function<double(const Vec2&)> pullback2(
    const PatchMapping& m, const std::function<double(const Vec2&)>& f);

// Pointwise pushforward of logical values at a logical point.
double push0_value(const PatchMapping& m, const Vec2& xhat, double v);
Vec2 push1_value(const PatchMapping& m, const Vec2& xhat, const Vec2& v);
double push2_value(const PatchMapping& m, const Vec2& xhat, double v);

// curl-div (rotated) variants: F^{1,*} : u_hat -> J^{-1} DF u_hat.
Vec2 push1_star_value(const PatchMapping& m, const Vec2& xhat, const Vec2& v);
std::function<Vec2(const Vec2&)> pullback1_star(
    const PatchMapping& m, const std::function<Vec2(const Vec2&)>& u);

/// L^p norm (p in {1,2,inf}) of a physical scalar field over one patch.
/// For vector fields the pointwise Euclidean norm is used. The infinity
/// norm is approximated by the max over quadrature nodes and cell centers.
double lp_norm_patch(const PatchMapping& m,
                     const std::vector<double>& breaks1,
                     const std::vector<double>& breaks2,
                     const std::function<double(const Vec2&)>& abs_value,
                     double p, const QuadratureSpec& quad, int degree);

} // namespace mpfeec
