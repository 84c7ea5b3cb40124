// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>

#include "mpfeec/broken.hpp"
#include "mpfeec/conforming.hpp"

namespace mpfeec {

/// Axis-aligned logical curve segment: the moving coordinate runs from
/// `from` to `to` (signed), the other coordinate is fixed.
struct CurveSegment {
  int patch = -1;
  int axis = 0;
  double fixed = 0;
  double from = 0, to = 0;
};
using CurvePlan = std::vector<CurveSegment>;

/// Pullback line integral of a physical vector field along a curve plan.
double circulation(const MultipatchComplex& cx, const VectorOnPatches& u,
                   const CurvePlan& plan, int quad_points);

/// Max physical gap between consecutive segment endpoints.
double curve_plan_gap(const MultipatchComplex& cx, const CurvePlan& plan);

/// Curve family of the perpendicular/vertex antiderivatives: L-shaped
/// curves on a coarse patch starting on the edge {s = s0} at perpendicular
/// level a, continued by a straight perpendicular segment on a fine patch
/// across the central edge. Either patch may be absent (homogeneous
/// boundary: fine only; inhomogeneous boundary: coarse only).
struct PerpCurveSystem {
  int central_edge = -1;
  int coarse_patch = -1;
  int fine_patch = -1;
  SideFrame cframe, fframe;
  double s0 = 0;
  bool fine_only() const { return coarse_patch < 0; }
  bool has_fine() const { return fine_patch >= 0; }
  int patch_role(int k) const; // 0 coarse, 1 fine, -1 not a member
};

/// System of the edge antiderivative Phi^e_perp.
PerpCurveSystem edge_perp_system(const MultipatchComplex& cx, int e);

/// Per-vertex curve rule: one system per nested sequence, sharing the
/// averaging length hat h_v and the starting points on e*(v).
struct VertexCurveRule {
  int vertex = -1;
  double avg_len = 0;
  std::vector<PerpCurveSystem> systems;
  int system_of_patch(int k) const;
};

/// Throws InvalidSequences on vertices without a valid decomposition.
VertexCurveRule build_vertex_curves(const MultipatchComplex& cx, int v);

/// Quadrature for the averaging parameter: Gauss nodes on [0, len],
/// subdivided at the perpendicular knot lines of the governing patches.
struct AverageRule {
  double len = 0;
  std::vector<double> nodes, weights; // weights sum to len
};
AverageRule make_average_rule(const MultipatchComplex& cx,
                              const std::vector<PerpCurveSystem>& systems,
                              double len, int n_avg);

/// Explicit curve of the perpendicular family for one (x, a).
CurvePlan perp_curve_plan(const MultipatchComplex& cx,
                          const PerpCurveSystem& s, int k, const Vec2& xhat,
                          double a);
/// Parallel edge curve gamma^e_par for x in patch k.
CurvePlan parallel_curve_plan(const MultipatchComplex& cx, int e, int k,
                              const Vec2& xhat);
/// Closing curve of the edge surface sigma^e (from the parallel curve start
/// to the perpendicular curve start, along patch edges).
CurvePlan tilde_edge_plan(const MultipatchComplex& cx,
                          const PerpCurveSystem& s, int k, const Vec2& xhat,
                          double a);
/// Closing curve of the edge-vertex surface (beta_e - beta_v through v).
CurvePlan tilde_edge_vertex_plan(const MultipatchComplex& cx,
                                 const PerpCurveSystem& se,
                                 const PerpCurveSystem& sv, int v, int k,
                                 const Vec2& xhat, double a_e, double a_v);

/// Single-patch directional antiderivative Phi^k_d.
class PhiPatch {
public:
  PhiPatch(const MultipatchComplex& cx, int k, int axis,
           const VectorOnPatches& u, int quad_points);
  double eval(const Vec2& xhat) const;

private:
  const MultipatchComplex* cx_;
  int k_, axis_, nq_;
  const VectorOnPatches* u_;
  mutable std::map<double, Prefix1D> tables_;
};

/// Parallel edge antiderivative Phi^e_par on Omega(e).
class PhiEdgeParallel {
public:
  PhiEdgeParallel(const MultipatchComplex& cx, int e, const VectorOnPatches& u,
                  int quad_points);
  double eval(int k, const Vec2& xhat) const;

private:
  const MultipatchComplex* cx_;
  int e_, nq_;
  const VectorOnPatches* u_;
  mutable std::map<std::pair<int, double>, Prefix1D> tables_; // (side, t)
};

/// Averaged perpendicular antiderivative over one or two curve systems
/// (Phi^e_perp when built from an edge, Phi^v when built from a vertex
/// rule). Prefix tables over spans are memoized per coordinate line.
class PhiPerp {
public:
  PhiPerp(const MultipatchComplex& cx, std::vector<PerpCurveSystem> systems,
          const AverageRule& rule, const VectorOnPatches& u, int quad_points);

  double eval(int k, const Vec2& xhat) const;
  const AverageRule& rule() const { return rule_; }
  /// Value for a single averaging parameter (used by oracles).
  double eval_at(int k, const Vec2& xhat, double a) const;

private:
  const MultipatchComplex* cx_;
  std::vector<PerpCurveSystem> systems_;
  AverageRule rule_;
  const VectorOnPatches* u_;
  int nq_;
  // per system: parallel prefix at level a (key a), perpendicular prefix at
  // fixed parallel coordinate (key s), both over [0,1] in frame coordinates
  struct Tables {
    mutable std::map<double, Prefix1D> par_at_level;
    mutable std::map<double, Prefix1D> perp_at_s_coarse;
    mutable std::map<double, Prefix1D> perp_at_s_fine;
  };
  mutable std::vector<Tables> tables_;

  double coarse_value(int sys, double s, double t, double a) const;
  double fine_delta(int sys, double s, double t) const;
};

/// Shared per-patch cumulative integrals of the 2-form pullback of f.
class PsiWorkspace {
public:
  PsiWorkspace(const MultipatchComplex& cx, const ScalarOnPatches& f,
               int quad_points);
  /// G_k(x1, x2) = int_0^{x1} int_0^{x2} fhat_k.
  double corner(int k, double x1, double x2) const;
  double box(int k, const LogicalBox& b) const;

private:
  std::vector<std::unique_ptr<BoxIntegral2D>> per_patch_;
};

struct SignedRect {
  int patch = -1;
  LogicalBox box;
  double sign = 0;
};
using SurfacePlan = std::vector<SignedRect>;

/// Oriented surface of the edge antiderivative Psi^e at (x, a).
SurfacePlan surface_plan_edge(const MultipatchComplex& cx,
                              const PerpCurveSystem& s, int k,
                              const Vec2& xhat, double a);
/// Oriented surface of the edge-vertex antiderivative Psi^{e,v}.
SurfacePlan surface_plan_edge_vertex(const MultipatchComplex& cx,
                                     const PerpCurveSystem& se,
                                     const PerpCurveSystem& sv, int v, int k,
                                     const Vec2& xhat, double a_e, double a_v);

double integrate_plan(const PsiWorkspace& ws, const SurfacePlan& plan);

int max_degree(const MultipatchComplex& cx);

/// Winding-number check of a surface plan against its boundary loops.
/// The winding of the physical boundary loop is computed once per
/// arrangement cell (angle summation) and compared with the plan's signed
/// indicator on an r x r raster per patch; points on an arrangement line
/// are skipped. Returns the number of mismatching raster points.
int winding_mismatch(const MultipatchComplex& cx, const SurfacePlan& plan,
                     const std::vector<CurvePlan>& boundary, int raster);

/// Independent surface-integral oracle: physical winding per arrangement
/// cell times fresh per-cell quadrature of the 2-form pullback of f.
double winding_oracle_value(const MultipatchComplex& cx,
                            const std::vector<CurvePlan>& boundary,
                            const ScalarOnPatches& f, int quad_points);

/// Bivariate antiderivatives consuming a shared workspace.
class Psi {
public:
  Psi(const MultipatchComplex& cx, const ScalarOnPatches& f,
      const QuadratureSpec& quad, int n_avg = 0);

  /// Psi^k: iterated integral from the patch origin.
  double eval_patch(int k, const Vec2& xhat) const;
  /// Psi^e: averaged signed surface integral.
  double eval_edge(int e, int k, const Vec2& xhat) const;
  /// Psi^{e,v}: difference of edge and vertex chains, averaged on [0,1].
  double eval_edge_vertex(int e, int v, int k, const Vec2& xhat) const;

  const PsiWorkspace& workspace() const { return ws_; }
  const AverageRule& edge_rule(int e) const { return edge_rules_.at(e); }
  /// ev rule: nodes abar on [0,1] with matched scalings.
  const AverageRule& ev_rule(int e, int v) const {
    return ev_rules_.at({e, v});
  }

private:
  const MultipatchComplex* cx_;
  PsiWorkspace ws_;
  std::map<int, PerpCurveSystem> edge_systems_;
  std::map<int, AverageRule> edge_rules_;
  std::map<int, VertexCurveRule> vertex_rules_;
  std::map<std::pair<int, int>, AverageRule> ev_rules_;
};

} // namespace mpfeec
