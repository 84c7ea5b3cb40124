// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "mpfeec/topology.hpp"

namespace mpfeec {

/// Physical field evaluators addressed in per-patch logical coordinates:
/// the value is taken at x = F_k(xhat), so mapping inverses never occur.
using ScalarOnPatches = std::function<double(int, const Vec2&)>;
using VectorOnPatches = std::function<Vec2(int, const Vec2&)>;

/// Patch-wise coefficient field of form degree ell in {0,1,2}.
struct BrokenField {
  int ell = 0;
  std::vector<Eigen::VectorXd> coeffs; // one block per patch

  static BrokenField zero(const MultipatchComplex& cx, int ell);
};

Eigen::VectorXd flatten(const MultipatchComplex& cx, const BrokenField& f);
BrokenField unflatten(const MultipatchComplex& cx, int ell,
                      const Eigen::VectorXd& v);

// Pointwise evaluation (physical values at F_k(xhat)).
double eval_scalar(const MultipatchComplex& cx, const BrokenField& f, int k,
                   const Vec2& xhat);
Vec2 eval_vector(const MultipatchComplex& cx, const BrokenField& f, int k,
                 const Vec2& xhat);

/// Wraps a broken field as an evaluator usable as projection input.
ScalarOnPatches as_scalar_evaluator(const MultipatchComplex& cx,
                                    const BrokenField& f);
VectorOnPatches as_vector_evaluator(const MultipatchComplex& cx,
                                    const BrokenField& f);

/// Patch-wise projections Pi^ell_pw (ell = 0 and 2 take scalars).
BrokenField project_pw(const MultipatchComplex& cx, int ell,
                       const ScalarOnPatches& f, const QuadratureSpec& quad);
BrokenField project_pw(const MultipatchComplex& cx,
                       const VectorOnPatches& u, const QuadratureSpec& quad);

// Broken differential operators, as fields and as global sparse matrices.
BrokenField grad_pw(const MultipatchComplex& cx, const BrokenField& f0);
BrokenField curl_pw(const MultipatchComplex& cx, const BrokenField& f1);
Eigen::SparseMatrix<double> grad_pw_matrix(const MultipatchComplex& cx);
Eigen::SparseMatrix<double> curl_pw_matrix(const MultipatchComplex& cx);

enum class EdgeDir { Parallel, Perp };

/// Directional broken gradient along edge e (zero outside Omega(e)).
Eigen::SparseMatrix<double> dir_grad_edge_matrix(const MultipatchComplex& cx,
                                                 int e, EdgeDir d);
BrokenField dir_grad_edge(const MultipatchComplex& cx, int e, EdgeDir d,
                          const BrokenField& f0);

/// Broken mixed derivative D^{2,e} (zero outside Omega(e)).
Eigen::SparseMatrix<double> mixed_deriv_edge_matrix(
    const MultipatchComplex& cx, int e);
BrokenField mixed_deriv_edge(const MultipatchComplex& cx, int e,
                             const BrokenField& f0);

struct JumpResult {
  double max_jump = 0; // max |trace difference| over samples
  double scale = 0;    // max |trace value| encountered (for relative checks)
};

/// Tangential jump of an ell=1 field across edge e, evaluated on the
/// reference conformity condition with the eta orientation sign. For
/// boundary edges the trace itself is returned (homogeneous BC checks).
JumpResult tangential_jump(const MultipatchComplex& cx, int e,
                           const BrokenField& f1, int samples = 33);

/// Value jump of an ell=0 field across edge e (trace on boundary edges).
JumpResult value_jump(const MultipatchComplex& cx, int e,
                      const BrokenField& f0, int samples = 33);

/// L^p norm (p in {1,2,inf}) of a physical field over the whole domain.
double lp_norm(const MultipatchComplex& cx, int ell, const ScalarOnPatches& f,
               double p, const QuadratureSpec& quad);
double lp_norm(const MultipatchComplex& cx, const VectorOnPatches& u, double p,
               const QuadratureSpec& quad);
double lp_norm(const MultipatchComplex& cx, const BrokenField& f, double p,
               const QuadratureSpec& quad);

// Serialization: JSON layout header plus raw little-endian payload.
void save_broken_field(const MultipatchComplex& cx, const BrokenField& f,
                       const std::string& header_path,
                       const std::string& payload_path);
BrokenField load_broken_field(const MultipatchComplex& cx,
                              const std::string& header_path,
                              const std::string& payload_path);

} // namespace mpfeec
